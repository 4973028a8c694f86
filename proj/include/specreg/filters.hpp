#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specreg {

struct ResidualValue {
  double value = 1.0;    // r_α(λ); may underflow to 0 while log_abs stays finite
  double log_abs = 0.0;  // ln|r_α(λ)|, -inf when r = 0
  int sign = 1;
};

class FilterKernel {
 public:
  virtual ~FilterKernel() = default;
  virtual double g(double alpha, double lambda) const = 0;
  // Residual at α = exp(log_alpha). Implementations must cope with α underflowing.
  virtual ResidualValue residual(double log_alpha, double lambda) const = 0;
  // Residual at a representable α; defaults to the log path.
  virtual ResidualValue residual_at(double alpha, double lambda) const { return residual(std::log(alpha), lambda); }
};

class FilterFamily {
 public:
  struct Meta {
    std::string id;
    double alpha_max = 1.0;
    double h2_constant = 1.0;
    bool oscillatory = false;
    std::map<std::string, double> params;
    double lambda_limit = 0.0;   // 0 means unbounded
    double min_log_alpha = -690.0;  // deepest ln α at which evaluation is meaningful
  };

  FilterFamily(Meta meta, std::shared_ptr<const FilterKernel> kernel);

  // A family given only by g; the residual is computed as 1 - λ g.
  static FilterFamily custom(std::string id, double alpha_max, double h2_constant,
                             std::function<double(double, double)> g, bool oscillatory = false);

  const std::string& id() const { return meta_.id; }
  double alpha_max() const { return meta_.alpha_max; }
  double h2_constant() const { return meta_.h2_constant; }
  bool oscillatory() const { return meta_.oscillatory; }
  const std::map<std::string, double>& params() const { return meta_.params; }
  bool has_lambda_limit() const { return meta_.lambda_limit > 0; }
  double lambda_limit() const { return meta_.lambda_limit; }
  double min_log_alpha() const { return meta_.min_log_alpha; }
  const FilterKernel& kernel() const { return *kernel_; }

 private:
  Meta meta_;
  std::shared_ptr<const FilterKernel> kernel_;
};

std::vector<std::string> catalog_ids();
// Accepts canonical ids and the short aliases ex3 .. ex10.
std::string canonical_filter_id(const std::string& id);
FilterFamily make_filter(const std::string& id, const std::map<std::string, double>& params = {});

double eval_g(const FilterFamily& filter, double alpha, double lambda);
ResidualValue eval_residual(const FilterFamily& filter, double alpha, double lambda);
ResidualValue eval_residual_log(const FilterFamily& filter, double log_alpha, double lambda);

struct AxiomReport {
  bool h1_finite = true;
  std::size_t h1_overflow_at_zero = 0;  // g(α, 0) = +inf from overflow, not counted as failure
  bool h2_bounded = true;
  double h2_observed_sup = 0.0;
  bool h3_checked = true;
  bool h3_pointwise = true;
  double h3_worst_deviation = 0.0;
  double h3_log_alpha = 0.0;  // ln α at which H3 was evaluated
  std::optional<std::pair<double, double>> h1_witness, h2_witness, h3_witness;
};

std::vector<double> default_axiom_alpha_grid(const FilterFamily& filter);
std::vector<double> default_axiom_lambda_grid(const FilterFamily& filter);

AxiomReport verify_srm_axioms(const FilterFamily& filter, const std::vector<double>& alpha_grid,
                              const std::vector<double>& lambda_grid);

}  // namespace specreg
