#include "specreg/filters.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/grid.hpp"
#include "specreg/logreal.hpp"

namespace specreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDeep = -1e6;
const double kLn3 = std::log(3.0);

ResidualValue from_log(double log_abs, int sign) {
  if (log_abs == -kInf || sign == 0) return {0.0, -kInf, 0};
  return {sign * std::exp(log_abs), log_abs, sign};
}

ResidualValue from_value(double v) {
  if (v == 0.0) return {0.0, -kInf, 0};
  return {v, std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

// ln(1 + e^y)
double softplus(double y) { return y > 0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

double sinc(double u) { return u < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

class Tikhonov : public FilterKernel {
 public:
  double g(double a, double l) const override { return 1.0 / (l + a); }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double a = std::exp(t);
    double log_abs = t - log_add_exp(t, std::log(l));
    return {a > 0 ? a / (a + l) : std::exp(log_abs), log_abs, 1};
  }
};

class Tsvd : public FilterKernel {
 public:
  double g(double a, double l) const override { return l >= a ? 1.0 / l : 0.0; }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    return l >= std::exp(t) ? ResidualValue{0.0, -kInf, 0} : ResidualValue{};
  }
  ResidualValue residual_at(double a, double l) const override {
    return l >= a && l > 0 ? ResidualValue{0.0, -kInf, 0} : ResidualValue{};
  }
};

class Ex3 : public FilterKernel {
 public:
  double g(double a, double l) const override {
    double e = std::exp(-1.0 / a);
    return -std::expm1(-1.0 / a) / (l + e);
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double inv = std::exp(-t);
    double log_abs = std::log1p(l) - softplus(std::log(l) + inv);
    double big = std::exp(inv);
    if (std::isfinite(big)) return {(1.0 + l) / (1.0 + l * big), log_abs, 1};
    return from_log(log_abs, 1);
  }
};

class Ex4 : public FilterKernel {
 public:
  double g(double a, double l) const override {
    double la = std::log(a);
    return (1.0 + 1.0 / la) / (l - 1.0 / la);
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double log_abs = std::log1p(l) - std::log1p(-l * t);
    return {(1.0 + l) / (1.0 - l * t), log_abs, 1};
  }
};

class Ex7 : public FilterKernel {
 public:
  static double small_lambda_g(double a) { return 1.0 / (2.0 * a - (a + 2.0 * a * a) / kLn3); }
  double g(double a, double l) const override {
    if (l < 2.0 * a) return small_lambda_g(a);
    double h = a / (a + std::log(a / (a + l)));
    return (1.0 - h) / (l + h);
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double a = std::exp(t);
    if (l < 2.0 * a) return from_value(1.0 - l * small_lambda_g(a));
    // r = α(1+λ)/(λL + α(1+λ)) with L = ln(α/(α+λ)) < 0; the denominator is negative.
    double L = t - log_add_exp(t, std::log(l));
    double log_lam_L = std::log(l) + std::log(-L);
    double log_num = t + std::log1p(l);
    double log_den = log_lam_L + std::log1p(-std::exp(log_num - log_lam_L));
    double log_abs = log_num - log_den;
    if (a > 0) return {a * (1.0 + l) / (l * L + a * (1.0 + l)), log_abs, -1};
    return from_log(log_abs, -1);
  }
};

// r = e^{-λ/α} + c(α) λ^{-1/2} |sin(λ^{3/2}/α)| with a family-specific coefficient c.
class Oscillatory : public FilterKernel {
 public:
  virtual double coef(double a) const = 0;
  virtual double log_coef(double t) const = 0;
  double g(double a, double l) const override {
    double c = coef(a);
    if (l == 0.0) return (1.0 - c) / a;
    double u = l * std::sqrt(l) / a;
    return -std::expm1(-l / a) / l - c / a * std::fabs(sinc(u));
  }
  ResidualValue residual_at(double a, double l) const override {
    if (l == 0.0) return {};
    double u = l * std::sqrt(l) / a;
    if (!std::isfinite(u)) return residual(std::log(a), l);
    double v = std::exp(-l / a) + coef(a) / std::sqrt(l) * std::fabs(std::sin(u));
    if (v > 0 && v > 1e-300) return from_value(v);
    return residual(std::log(a), l);
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double ll = std::log(l);
    double u = std::exp(1.5 * ll - t);
    double s = std::fabs(std::sin(u));
    double log_exp_part = -std::exp(ll - t);
    double log_osc = s > 0 ? log_coef(t) - 0.5 * ll + std::log(s) : -kInf;
    double log_abs = log_add_exp(log_exp_part, log_osc);
    double a = std::exp(t);
    if (a > 0 && std::isfinite(u)) {
      double v = std::exp(-l / a) + coef(a) / std::sqrt(l) * s;
      if (v > 0) return {v, log_abs, 1};
    }
    return from_log(log_abs, 1);
  }
};

class Ex8 : public Oscillatory {
 public:
  explicit Ex8(double k) : k_(k) {}
  double coef(double a) const override { return std::pow(a, k_); }
  double log_coef(double t) const override { return k_ * t; }

 private:
  double k_;
};

class Ex9 : public Oscillatory {
 public:
  double coef(double a) const override { return std::exp(-1.0 / std::sqrt(a)); }
  double log_coef(double t) const override { return -std::exp(-0.5 * t); }
};

class Ex10 : public Oscillatory {
 public:
  double coef(double a) const override { return -1.0 / std::log(a); }
  double log_coef(double t) const override { return -std::log(-t); }
};

class Landweber : public FilterKernel {
 public:
  explicit Landweber(double mu) : mu_(mu) {}
  double g(double a, double l) const override {
    if (l == 0.0) return mu_ / a;
    return -std::expm1(std::log1p(-mu_ * l) / a) / l;
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    double base = std::log1p(-mu_ * l);
    if (base == -kInf) return {0.0, -kInf, 0};
    return from_log(base * std::exp(-t), 1);
  }

 private:
  double mu_;
};

class Showalter : public FilterKernel {
 public:
  double g(double a, double l) const override {
    if (l == 0.0) return 1.0 / a;
    return -std::expm1(-l / a) / l;
  }
  ResidualValue residual(double t, double l) const override {
    if (l == 0.0) return {};
    return from_log(-std::exp(std::log(l) - t), 1);
  }
};

class Generic : public FilterKernel {
 public:
  explicit Generic(std::function<double(double, double)> g) : g_(std::move(g)) {}
  double g(double a, double l) const override { return g_(a, l); }
  ResidualValue residual(double t, double l) const override {
    double a = std::exp(t);
    if (!(a > 0)) throw ParameterOutOfRange("alpha underflows for a generic family");
    return from_value(1.0 - l * g_(a, l));
  }

 private:
  std::function<double(double, double)> g_;
};

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& p, std::initializer_list<const char*> allowed,
                    const std::string& id) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ParameterOutOfRange("filter " + id + " has no parameter '" + k + "'");
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_lambda(const FilterFamily& f, double lambda) {
  if (!(lambda >= 0)) throw ParameterOutOfRange("lambda must be nonnegative, got " + fmt(lambda));
  if (f.has_lambda_limit() && lambda > f.lambda_limit())
    throw ParameterOutOfRange("lambda " + fmt(lambda) + " outside the valid range of " + f.id() +
                              " (<= " + fmt(f.lambda_limit()) + ")");
}

void check_alpha(const FilterFamily& f, double alpha) {
  if (!(alpha > 0 && alpha < f.alpha_max()))
    throw ParameterOutOfRange("alpha " + fmt(alpha) + " outside (0, " + fmt(f.alpha_max()) + ")");
}

}  // namespace

FilterFamily::FilterFamily(Meta meta, std::shared_ptr<const FilterKernel> kernel)
    : meta_(std::move(meta)), kernel_(std::move(kernel)) {
  if (!(meta_.alpha_max > 0)) throw ParameterOutOfRange("alpha_max must be positive");
  if (!(meta_.h2_constant > 0)) throw ParameterOutOfRange("h2_constant must be positive");
}

FilterFamily FilterFamily::custom(std::string id, double alpha_max, double h2_constant,
                                  std::function<double(double, double)> g, bool oscillatory) {
  Meta m;
  m.id = std::move(id);
  m.alpha_max = alpha_max;
  m.h2_constant = h2_constant;
  m.oscillatory = oscillatory;
  return FilterFamily(std::move(m), std::make_shared<Generic>(std::move(g)));
}

std::vector<std::string> catalog_ids() {
  return {"tikhonov", "tsvd",   "ex3_exp",  "ex4_log",   "ex7_piecewise",
          "ex8_osc",  "ex9_osc", "ex10_osc", "landweber", "showalter"};
}

std::string canonical_filter_id(const std::string& id) {
  static const std::map<std::string, std::string> alias = {
      {"ex1", "tikhonov"}, {"ex2", "tsvd"},       {"ex3", "ex3_exp"},  {"ex4", "ex4_log"},
      {"ex7", "ex7_piecewise"}, {"ex8", "ex8_osc"}, {"ex9", "ex9_osc"}, {"ex10", "ex10_osc"}};
  auto it = alias.find(id);
  std::string c = it == alias.end() ? id : it->second;
  for (const auto& k : catalog_ids())
    if (k == c) return c;
  throw UnknownFilter("unknown filter id '" + id + "'");
}

FilterFamily make_filter(const std::string& raw_id, const std::map<std::string, double>& p) {
  const std::string id = canonical_filter_id(raw_id);
  FilterFamily::Meta m;
  m.id = id;
  m.alpha_max = param(p, "alpha_max", 1.0);
  m.min_log_alpha = kDeep;
  std::shared_ptr<const FilterKernel> k;

  if (id == "tikhonov") {
    reject_unknown(p, {"alpha_max"}, id);
    k = std::make_shared<Tikhonov>();
  } else if (id == "tsvd") {
    reject_unknown(p, {"alpha_max"}, id);
    k = std::make_shared<Tsvd>();
  } else if (id == "ex3_exp") {
    reject_unknown(p, {"alpha_max"}, id);
    m.min_log_alpha = -700.0;
    k = std::make_shared<Ex3>();
  } else if (id == "ex4_log") {
    reject_unknown(p, {"alpha_max"}, id);
    m.alpha_max = param(p, "alpha_max", 0.3);
    if (!(m.alpha_max < std::exp(-1.0))) throw ParameterOutOfRange("ex4_log requires alpha_max < 1/e");
    k = std::make_shared<Ex4>();
  } else if (id == "ex7_piecewise") {
    reject_unknown(p, {"alpha_max"}, id);
    m.alpha_max = param(p, "alpha_max", 0.4);
    if (!(m.alpha_max < 0.5)) throw ParameterOutOfRange("ex7_piecewise requires alpha_max < 1/2");
    m.h2_constant = 2.0 / (2.0 - (1.0 + 2.0 * m.alpha_max) / kLn3);
    k = std::make_shared<Ex7>();
  } else if (id == "ex8_osc") {
    reject_unknown(p, {"alpha_max", "k"}, id);
    double kk = param(p, "k", 1.0);
    if (!(kk >= 1.0 / 3.0)) throw ParameterOutOfRange("ex8_osc requires k >= 1/3 (H2)");
    if (!(m.alpha_max <= 1.0)) throw ParameterOutOfRange("ex8_osc requires alpha_max <= 1");
    m.params["k"] = kk;
    m.oscillatory = true;
    m.min_log_alpha = -690.0;
    k = std::make_shared<Ex8>(kk);
  } else if (id == "ex9_osc") {
    reject_unknown(p, {"alpha_max"}, id);
    if (!(m.alpha_max <= 1.0)) throw ParameterOutOfRange("ex9_osc requires alpha_max <= 1");
    m.oscillatory = true;
    m.min_log_alpha = -690.0;
    k = std::make_shared<Ex9>();
  } else if (id == "ex10_osc") {
    reject_unknown(p, {"alpha_max"}, id);
    m.alpha_max = param(p, "alpha_max", 0.5);
    if (!(m.alpha_max <= 0.5)) throw ParameterOutOfRange("ex10_osc requires alpha_max <= 1/2");
    m.h2_constant = 12.0;
    m.oscillatory = true;
    m.min_log_alpha = -690.0;
    k = std::make_shared<Ex10>();
  } else if (id == "landweber") {
    reject_unknown(p, {"alpha_max", "mu"}, id);
    double mu = param(p, "mu", 0.5);
    if (!(mu > 0)) throw ParameterOutOfRange("landweber requires mu > 0");
    m.params["mu"] = mu;
    m.lambda_limit = 1.0 / mu;
    m.min_log_alpha = -700.0;
    k = std::make_shared<Landweber>(mu);
  } else {
    reject_unknown(p, {"alpha_max"}, id);
    m.min_log_alpha = -700.0;
    k = std::make_shared<Showalter>();
  }
  if (!(m.alpha_max > 0)) throw ParameterOutOfRange("alpha_max must be positive");
  return FilterFamily(std::move(m), std::move(k));
}

double eval_g(const FilterFamily& f, double alpha, double lambda) {
  check_alpha(f, alpha);
  check_lambda(f, lambda);
  return f.kernel().g(alpha, lambda);
}

ResidualValue eval_residual(const FilterFamily& f, double alpha, double lambda) {
  check_alpha(f, alpha);
  check_lambda(f, lambda);
  return f.kernel().residual_at(alpha, lambda);
}

ResidualValue eval_residual_log(const FilterFamily& f, double log_alpha, double lambda) {
  if (!(log_alpha < std::log(f.alpha_max())))
    throw ParameterOutOfRange("ln alpha " + fmt(log_alpha) + " not below ln alpha_max");
  check_lambda(f, lambda);
  return f.kernel().residual(log_alpha, lambda);
}

std::vector<double> default_axiom_alpha_grid(const FilterFamily& f) {
  return geometric_ascending(1e-7, 0.999 * f.alpha_max(), 8);
}

std::vector<double> default_axiom_lambda_grid(const FilterFamily& f) {
  double hi = f.has_lambda_limit() ? f.lambda_limit() : 1e3;
  auto g = geometric_ascending(1e-3, hi, 8);
  g.insert(g.begin(), 0.0);
  return g;
}

AxiomReport verify_srm_axioms(const FilterFamily& f, const std::vector<double>& alpha_grid,
                              const std::vector<double>& lambda_grid) {
  AxiomReport rep;
  constexpr double kH3Tol = 1e-2;
  for (double a : alpha_grid) {
    for (double l : lambda_grid) {
      double g = eval_g(f, a, l);
      if (l == 0.0 && g == kInf) {
        ++rep.h1_overflow_at_zero;
        continue;
      }
      if (!std::isfinite(g)) {
        if (rep.h1_finite) rep.h1_witness = {{a, l}};
        rep.h1_finite = false;
        continue;
      }
      double lg = std::fabs(l * g);
      if (lg > rep.h2_observed_sup) rep.h2_observed_sup = lg;
      if (lg > f.h2_constant() + 1e-9 && rep.h2_bounded) {
        rep.h2_bounded = false;
        rep.h2_witness = {{a, l}};
      }
    }
  }
  // H3 is a pointwise limit; it is probed at the deepest α the family can evaluate.
  double a_min = alpha_grid.empty() ? f.alpha_max() : alpha_grid.front();
  for (double a : alpha_grid) a_min = std::min(a_min, a);
  rep.h3_log_alpha = std::min(std::log(a_min), std::max(f.min_log_alpha(), kDeep));
  if (f.oscillatory()) {
    rep.h3_checked = false;
    return rep;
  }
  for (double l : lambda_grid) {
    if (l <= 0) continue;
    ResidualValue r = f.kernel().residual(rep.h3_log_alpha, l);
    double dev = std::fabs(r.value);
    if (dev > rep.h3_worst_deviation) {
      rep.h3_worst_deviation = dev;
      if (dev >= kH3Tol) {
        rep.h3_pointwise = false;
        rep.h3_witness = {{std::exp(rep.h3_log_alpha), l}};
      }
    }
  }
  return rep;
}

}  // namespace specreg
