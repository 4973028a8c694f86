#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specreg/filters.hpp"
#include "specreg/functions.hpp"
#include "specreg/operators.hpp"
#include "specreg/qualification.hpp"

namespace specreg {

struct StudyRecord {
  double alpha;
  double err;
  double rho;
  double ratio;
  double log_err;  // -inf when err = 0
  double log_rho;
  double log_ratio;
};

struct StudyContext {
  std::string filter_id;
  Provenance model_provenance;
  std::string source;
  std::string rho;
  SpectralModel model;
  CoefVector x_dagger;
};

struct ConvergenceStudy {
  std::vector<StudyRecord> records;  // descending α
  StudyContext context;
};

struct FitWindow {
  double alpha_lo;
  double alpha_hi;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitWindow window{};
  std::size_t points = 0;
};

// Descending α from α₀/2 (capped at 0.5) to 1e-7, 16 per decade.
std::vector<double> default_study_alpha_grid(const FilterFamily& filter);

ConvergenceStudy run_convergence(const SpectralModel& model, const FilterFamily& filter, const SourceElement& source,
                                 const OrderFn& rho, const std::vector<double>& alpha_grid);

// [max(α_min, 10·λ_dim), α_max] of the study.
FitWindow default_fit_window(const ConvergenceStudy& study);
SlopeFit fit_order(const ConvergenceStudy& study, const FitWindow& window);
SlopeFit fit_order(const ConvergenceStudy& study);

constexpr double kRatioCap = 1e6;
constexpr double kBoundedSlope = 0.75;

// bounded: max ratio over the fit window < kRatioCap and the slope over the
// deepest decade of the window is >= kBoundedSlope.
struct TailDiagnostics {
  bool bounded = false;
  double max_ratio = 0.0;
  SlopeFit fit;       // whole window
  SlopeFit deep_fit;  // deepest decade
};
TailDiagnostics tail_diagnostics(const ConvergenceStudy& study);

struct ConverseResult {
  PairVerdict pair_certificate;
  std::optional<bool> prediction;  // empty when the certificate fails
  Membership verification;
  TailDiagnostics tail;
  std::string agreement;  // "agree", "disagree" or "declined"
};

ConverseResult converse_probe(const ConvergenceStudy& study, const FilterFamily& filter, const OrderFn& rho,
                              const SourceFn& s, const std::optional<OrderFn>& h);

struct GeneratorCheck {
  std::string generator;
  bool inside = false;
  std::optional<std::size_t> witness;
};

struct CandidateResult {
  std::string source;
  PairVerdict strong_pair;
  bool included = false;  // strong pair holds, so an inclusion claim is made
  std::optional<double> k;  // max_j s(λ_j)/ŝ(λ_j)
  std::vector<GeneratorCheck> generators;
  bool inclusion_holds = false;
};

struct MaximalSourceReport {
  std::string filter_id;
  std::string rho;
  Level level = Level::None;
  std::vector<double> srho_on_spectrum;
  std::vector<CandidateResult> candidates;
};

MaximalSourceReport maximal_source_demo(const SpectralModel& model, const FilterFamily& filter, const OrderFn& rho,
                                        const std::vector<SourceFn>& candidates);

std::string study_to_csv(const ConvergenceStudy& study);

}  // namespace specreg
