#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specreg/filters.hpp"
#include "specreg/functions.hpp"
#include "specreg/limits.hpp"

namespace specreg {

// Order-source acceptance floor for γ; see the decisions ledger.
constexpr double kOrderSourceFloor = 1e-2;

struct Witness {
  double alpha;
  double lambda;
};

struct PairVerdict {
  bool holds = false;
  std::optional<double> bound_k;
  std::optional<double> gamma;
  std::optional<std::string> h_used;
  std::string source;  // description of s used
  std::vector<Witness> witnesses;
  std::string note;
};

struct SrhoEntry {
  double lambda;
  LimitEstimate estimate;
};

struct Mu0Interval {
  double low = 0.0;
  double high = 0.0;  // +inf when no μ failed
  bool zero = false;
  bool infinite = false;
  std::vector<std::pair<double, bool>> tested;
};

struct MpVerdict {
  bool passes = false;
  double a = 1.0;
  std::optional<double> gamma;
  std::optional<double> witness_alpha;
  double growth = 0.0;  // tail max ratio / median ratio
};

enum class Level { None, Weak, Strong, Optimal };
std::string to_string(Level l);

struct QualificationReport {
  std::string filter_id;
  std::string rho;
  Level level = Level::None;
  std::vector<SrhoEntry> srho_table;
  Mu0Interval classical_mu0;
  MpVerdict mp;
  PairVerdict weak_evidence, strong_evidence, optimal_evidence;
  TailPlan plan{};
  std::vector<double> lambda_grid;
};

// λ grid 1e-2..1e1 (4/decade), clipped to the filter's valid λ range.
std::vector<double> default_lambda_grid(const FilterFamily& filter);
std::vector<double> default_mu_grid();

LimitEstimate estimate_srho(const FilterFamily& filter, const OrderFn& rho, double lambda,
                            const AlphaGrid& grid = {});
// Tail limit of e^{log_s}|r_α(λ)|/ρ(α).
LimitEstimate estimate_pair_ratio(const FilterFamily& filter, double log_s, const OrderFn& rho, double lambda,
                                  LimitKind kind, const AlphaGrid& grid = {});

PairVerdict check_weak_pair(const FilterFamily& filter, const SourceFn& s, const OrderFn& rho,
                            const std::vector<double>& lambda_grid, const AlphaGrid& grid = {});
PairVerdict check_strong_pair(const FilterFamily& filter, const SourceFn& s, const OrderFn& rho,
                              const std::vector<double>& lambda_grid, const AlphaGrid& grid = {});
// Tabulated variants: log_s[i] = ln s(lambda_grid[i]).
PairVerdict check_weak_pair_tabulated(const FilterFamily& filter, const std::vector<double>& log_s,
                                      const std::string& source, const OrderFn& rho,
                                      const std::vector<double>& lambda_grid, const AlphaGrid& grid = {});

struct HFunction {
  LogFn log_h;  // ln h as a function of ln α
  std::string description;
};
HFunction default_h(const OrderFn& rho);
HFunction h_from_order(const OrderFn& h);

PairVerdict check_order_source_pair(const FilterFamily& filter, const OrderFn& rho, const SourceFn& s,
                                    const std::optional<OrderFn>& h, const std::vector<double>& lambda_grid,
                                    const AlphaGrid& grid = {});
PairVerdict check_order_source_pair_tabulated(const FilterFamily& filter, const OrderFn& rho,
                                              const std::vector<double>& log_s, const std::string& source,
                                              const HFunction& h, const std::vector<double>& lambda_grid,
                                              const AlphaGrid& grid = {});

QualificationReport classify(const FilterFamily& filter, const OrderFn& rho,
                             const std::vector<double>& lambda_grid, const AlphaGrid& grid = {});
QualificationReport classify(const FilterFamily& filter, const OrderFn& rho);

Mu0Interval estimate_classical_order(const FilterFamily& filter, const std::vector<double>& mu_grid,
                                     const std::vector<double>& lambda_grid, const AlphaGrid& grid = {});
Mu0Interval estimate_classical_order(const FilterFamily& filter);

// Default grids for the MP check: α from min(a, α₀/2) down to 1e-7 (64/decade),
// λ geometric on [1e-9, a] (16/decade).
std::vector<double> default_mp_alpha_grid(const FilterFamily& filter, double a);
std::vector<double> default_mp_lambda_grid(double a);
double default_mp_a(const FilterFamily& filter);
// As above, halved until ρ is finite and positive at a (ρ = −1/ln α is undefined at α = 1).
double default_mp_a(const FilterFamily& filter, const OrderFn& rho);

MpVerdict check_mp_qualification(const FilterFamily& filter, const OrderFn& rho, double a,
                                 const std::vector<double>& lambda_grid, const std::vector<double>& alpha_grid);
MpVerdict check_mp_qualification(const FilterFamily& filter, const OrderFn& rho);

struct Construction {
  std::vector<double> lambda;     // ascending
  std::vector<double> theta;
  std::vector<double> f;          // strictly increasing after jump removal
  std::vector<double> alpha;      // descending
  std::vector<double> h;          // h(α)
  std::vector<double> z;          // r_α(h(α))
  std::vector<double> rho_star;   // running-max envelope of z
  std::vector<double> log_rho_star;
  PairVerdict certificate;
};

std::vector<double> default_construct_lambda_grid(const FilterFamily& filter);
Construction construct_weak_qualification(const FilterFamily& filter, const std::vector<double>& lambda_grid,
                                          const std::vector<double>& alpha_grid);
Construction construct_weak_qualification(const FilterFamily& filter);

}  // namespace specreg
