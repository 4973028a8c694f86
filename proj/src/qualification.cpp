#include "specreg/qualification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"

namespace specreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxWitnesses = 8;

double finite_abs(double x) { return std::isfinite(x) ? std::fabs(x) : 0.0; }

void require_certified(const OrderFn& rho) {
  if (!rho.certified()) throw Uncertified("order function '" + rho.text() + "' is not certified: " + rho.info().failure);
}

void require_certified(const SourceFn& s) {
  if (!s.certified()) throw Uncertified("source function '" + s.text() + "' is not certified: " + s.info().failure);
}

void check_lambda(const FilterFamily& filter, double lambda) {
  if (!(lambda > 0)) throw ParameterOutOfRange("lambda must be positive");
  if (filter.has_lambda_limit() && lambda > filter.lambda_limit())
    throw ParameterOutOfRange("lambda outside the valid range of " + filter.id());
}

double log_r(const FilterFamily& filter, double t, double lambda) {
  return filter.kernel().residual(t, lambda).log_abs;
}

Witness deepest(const LimitEstimate& e, double lambda) { return {std::exp(e.grid_meta.log_alpha_min), lambda}; }

}  // namespace

std::string to_string(Level l) {
  switch (l) {
    case Level::Weak: return "weak";
    case Level::Strong: return "strong";
    case Level::Optimal: return "optimal";
    default: return "none";
  }
}

std::vector<double> default_lambda_grid(const FilterFamily& filter) {
  std::vector<double> out;
  for (double l : default_lambda_grid())
    if (!filter.has_lambda_limit() || l < filter.lambda_limit()) out.push_back(l);
  return out;
}

std::vector<double> default_mu_grid() {
  std::vector<double> mu;
  for (int j = -6; j <= 6; ++j) mu.push_back(std::ldexp(1.0, j));
  return mu;
}

LimitEstimate estimate_srho(const FilterFamily& filter, const OrderFn& rho, double lambda, const AlphaGrid& grid) {
  require_certified(rho);
  check_lambda(filter, lambda);
  TailFn f = [&](double t) {
    double lr = rho.log_at(t);
    double rr = log_r(filter, t, lambda);
    if (rr == -kInf) return TailSample{kInf, 0.0};
    return TailSample{lr - rr, std::max(finite_abs(lr), finite_abs(rr))};
  };
  return estimate_tail_limit(LimitKind::Liminf, f, make_tail_plan(filter, grid));
}

LimitEstimate estimate_pair_ratio(const FilterFamily& filter, double log_s, const OrderFn& rho, double lambda,
                                  LimitKind kind, const AlphaGrid& grid) {
  check_lambda(filter, lambda);
  TailFn f = [&](double t) {
    double lr = rho.log_at(t);
    double rr = log_r(filter, t, lambda);
    if (rr == -kInf || log_s == -kInf) return TailSample{-kInf, 0.0};
    return TailSample{log_s + rr - lr, std::max(finite_abs(lr), finite_abs(rr))};
  };
  return estimate_tail_limit(kind, f, make_tail_plan(filter, grid));
}

PairVerdict check_weak_pair_tabulated(const FilterFamily& filter, const std::vector<double>& log_s,
                                      const std::string& source, const OrderFn& rho,
                                      const std::vector<double>& lambda_grid, const AlphaGrid& grid) {
  require_certified(rho);
  if (log_s.size() != lambda_grid.size()) throw InputError("tabulated source does not match the lambda grid");
  PairVerdict v;
  v.source = source;
  double k = 0.0;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    LimitEstimate e = estimate_pair_ratio(filter, log_s[i], rho, lambda_grid[i], LimitKind::Limsup, grid);
    if (!e.finite()) {
      v.witnesses.push_back(deepest(e, lambda_grid[i]));
      if (v.witnesses.size() >= kMaxWitnesses) break;
    } else {
      k = std::max(k, e.tail_max);
    }
  }
  v.holds = v.witnesses.empty();
  if (v.holds) v.bound_k = k;
  return v;
}

namespace {
std::vector<double> tabulate(const SourceFn& s, const std::vector<double>& lambda_grid) {
  std::vector<double> out;
  for (double l : lambda_grid) out.push_back(s.log_at(std::log(l)));
  return out;
}
}  // namespace

PairVerdict check_weak_pair(const FilterFamily& filter, const SourceFn& s, const OrderFn& rho,
                            const std::vector<double>& lambda_grid, const AlphaGrid& grid) {
  require_certified(s);
  return check_weak_pair_tabulated(filter, tabulate(s, lambda_grid), s.text(), rho, lambda_grid, grid);
}

PairVerdict check_strong_pair(const FilterFamily& filter, const SourceFn& s, const OrderFn& rho,
                              const std::vector<double>& lambda_grid, const AlphaGrid& grid) {
  require_certified(s);
  require_certified(rho);
  PairVerdict v;
  v.source = s.text();
  double k = 0.0;
  for (double l : lambda_grid) {
    LimitEstimate e = estimate_pair_ratio(filter, s.log_at(std::log(l)), rho, l, LimitKind::Limsup, grid);
    if (!e.finite() || !e.positive()) {
      v.witnesses.push_back(deepest(e, l));
      if (v.witnesses.size() >= kMaxWitnesses) break;
    } else {
      k = std::max(k, e.tail_max);
    }
  }
  v.holds = v.witnesses.empty();
  if (v.holds) v.bound_k = k;
  return v;
}

HFunction default_h(const OrderFn& rho) {
  return {[rho](double t) { return rho.log_at(t); }, "rho clamped to the lambda grid: " + rho.text()};
}

HFunction h_from_order(const OrderFn& h) {
  return {[h](double t) { return h.log_at(t); }, "h clamped to the lambda grid: " + h.text()};
}

PairVerdict check_order_source_pair_tabulated(const FilterFamily& filter, const OrderFn& rho,
                                              const std::vector<double>& log_s, const std::string& source,
                                              const HFunction& h, const std::vector<double>& lambda_grid,
                                              const AlphaGrid& grid) {
  require_certified(rho);
  if (log_s.size() != lambda_grid.size() || lambda_grid.empty())
    throw InputError("tabulated source does not match the lambda grid");
  for (double l : lambda_grid) check_lambda(filter, l);
  PairVerdict v;
  v.source = source;
  v.h_used = h.description;
  const double log_floor = std::log(kOrderSourceFloor);
  const double lmin = std::log(*std::min_element(lambda_grid.begin(), lambda_grid.end()));
  const double lmax = std::log(*std::max_element(lambda_grid.begin(), lambda_grid.end()));
  double worst = kInf;
  for (double t : base_log_alpha_grid(filter, grid)) {
    const double lh = std::clamp(h.log_h(t), lmin, lmax);
    const double lr = rho.log_at(t);
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      if (std::log(lambda_grid[i]) < lh) continue;
      double q = log_s[i] + log_r(filter, t, lambda_grid[i]) - lr;
      if (q < worst) worst = q;
      if (q <= log_floor && v.witnesses.size() < kMaxWitnesses) v.witnesses.push_back({std::exp(t), lambda_grid[i]});
    }
  }
  v.gamma = std::exp(worst);
  v.holds = v.witnesses.empty();
  if (!v.holds) v.note = "no certificate found for this h";
  return v;
}

PairVerdict check_order_source_pair(const FilterFamily& filter, const OrderFn& rho, const SourceFn& s,
                                    const std::optional<OrderFn>& h, const std::vector<double>& lambda_grid,
                                    const AlphaGrid& grid) {
  require_certified(s);
  if (h) require_certified(*h);
  return check_order_source_pair_tabulated(filter, rho, tabulate(s, lambda_grid), s.text(),
                                           h ? h_from_order(*h) : default_h(rho), lambda_grid, grid);
}

Mu0Interval estimate_classical_order(const FilterFamily& filter, const std::vector<double>& mu_grid,
                                     const std::vector<double>& lambda_grid, const AlphaGrid& grid) {
  if (mu_grid.empty()) throw InputError("empty mu grid");
  for (std::size_t i = 0; i < mu_grid.size(); ++i)
    if (!(mu_grid[i] > 0) || (i && !(mu_grid[i] > mu_grid[i - 1])))
      throw InputError("mu grid must be positive and increasing");
  for (double l : lambda_grid) check_lambda(filter, l);
  const TailPlan plan = make_tail_plan(filter, grid);
  Mu0Interval out;
  out.high = kInf;
  bool seen_fail = false;
  for (double mu : mu_grid) {
    bool bounded = true;
    for (double l : lambda_grid) {
      const double ll = std::log(l);
      TailFn f = [&](double t) {
        double rr = log_r(filter, t, l);
        if (rr == -kInf) return TailSample{-kInf, 0.0};
        double a = mu * (ll - t);
        return TailSample{a + rr, std::max(std::fabs(a), finite_abs(rr))};
      };
      if (!estimate_tail_limit(LimitKind::Limsup, f, plan).finite()) {
        bounded = false;
        break;
      }
    }
    out.tested.emplace_back(mu, bounded);
    if (bounded && !seen_fail) out.low = mu;
    if (!bounded && !seen_fail) {
      out.high = mu;
      seen_fail = true;
    }
  }
  out.zero = !out.tested.front().second;
  out.infinite = out.tested.back().second;
  return out;
}

Mu0Interval estimate_classical_order(const FilterFamily& filter) {
  return estimate_classical_order(filter, default_mu_grid(), default_lambda_grid(filter));
}

double default_mp_a(const FilterFamily& filter) {
  double a = filter.alpha_max();
  if (filter.has_lambda_limit()) a = std::min(a, filter.lambda_limit());
  return a;
}

double default_mp_a(const FilterFamily& filter, const OrderFn& rho) {
  double a = default_mp_a(filter);
  for (int i = 0; i < 30; ++i, a /= 2) {
    try {
      double v = rho.log_at(std::log(a));
      if (std::isfinite(v)) return a;
    } catch (const DomainError&) {
    }
  }
  throw DomainError("order function '" + rho.text() + "' is not evaluable near the top of the alpha range");
}

std::vector<double> default_mp_alpha_grid(const FilterFamily& filter, double a) {
  double hi = std::min(a, filter.alpha_max() / 2.0);
  std::vector<double> out;
  for (double t : log_points_desc(std::log(hi), std::log(1e-7), 64)) out.push_back(std::exp(t));
  return out;
}

std::vector<double> default_mp_lambda_grid(double a) { return geometric_ascending(1e-9, a, 16); }

MpVerdict check_mp_qualification(const FilterFamily& filter, const OrderFn& rho, double a,
                                 const std::vector<double>& lambda_grid, const std::vector<double>& alpha_grid) {
  require_certified(rho);
  if (!(a > 0)) throw ParameterOutOfRange("a must be positive");
  if (alpha_grid.size() < 2 || lambda_grid.empty()) throw InputError("MP check needs non-trivial grids");
  for (double l : lambda_grid) {
    if (!(l > 0 && l <= a)) throw ParameterOutOfRange("lambda grid must lie in (0, a]");
    check_lambda(filter, l);
  }
  std::vector<double> lrho_lambda;
  for (double l : lambda_grid) lrho_lambda.push_back(rho.log_at(std::log(l)));

  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  std::vector<double> R;
  for (double al : alphas) {
    if (!(al > 0 && al <= a && al < filter.alpha_max())) throw ParameterOutOfRange("alpha grid must lie in (0, a]");
    const double t = std::log(al);
    double S = -kInf;
    for (std::size_t j = 0; j < lambda_grid.size(); ++j)
      S = std::max(S, log_r(filter, t, lambda_grid[j]) + lrho_lambda[j]);
    // The sup over (0, a] is also sampled just below and at λ = α, where filters
    // with a jump there (TSVD) attain it.
    for (double l : {al * (1 - 1e-9), al})
      if (l <= a) S = std::max(S, log_r(filter, t, l) + rho.log_at(std::log(l)));
    R.push_back(S - rho.log_at(t));
  }
  MpVerdict v;
  v.a = a;
  const std::size_t n = R.size(), mid = n / 2;
  std::vector<double> sorted = R;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid), sorted.end());
  const double median = sorted[mid];
  double tail_max = -kInf;
  for (std::size_t i = mid; i < n; ++i) tail_max = std::max(tail_max, R[i]);
  v.growth = std::exp(tail_max - median);
  const double threshold = median + std::log(100.0);
  if (tail_max > threshold) {
    for (std::size_t i = mid; i < n; ++i)
      if (R[i] > threshold) {
        v.witness_alpha = alphas[i];
        break;
      }
    return v;
  }
  v.passes = true;
  v.gamma = std::exp(tail_max);
  return v;
}

MpVerdict check_mp_qualification(const FilterFamily& filter, const OrderFn& rho) {
  require_certified(rho);
  double a = default_mp_a(filter, rho);
  return check_mp_qualification(filter, rho, a, default_mp_lambda_grid(a), default_mp_alpha_grid(filter, a));
}

QualificationReport classify(const FilterFamily& filter, const OrderFn& rho, const std::vector<double>& lambda_grid,
                             const AlphaGrid& grid) {
  require_certified(rho);
  if (lambda_grid.empty()) throw InputError("empty lambda grid");
  QualificationReport rep;
  rep.filter_id = filter.id();
  rep.rho = rho.text();
  rep.plan = make_tail_plan(filter, grid);
  rep.lambda_grid = lambda_grid;

  bool strong = true;
  std::vector<double> log_shat;
  rep.strong_evidence.source = "s_rho (tabulated estimate)";
  for (double l : lambda_grid) {
    LimitEstimate e = estimate_srho(filter, rho, l, grid);
    const bool ok = e.stabilized && e.finite() && e.positive();
    if (!ok) {
      strong = false;
      if (rep.strong_evidence.witnesses.size() < kMaxWitnesses) rep.strong_evidence.witnesses.push_back(deepest(e, l));
    }
    log_shat.push_back(std::log(e.value));
    rep.srho_table.push_back({l, e});
  }
  rep.strong_evidence.holds = strong;
  rep.strong_evidence.note = strong ? "0 < s_rho < inf at every sampled lambda"
                                    : "s_rho not certified finite and positive at every sampled lambda";

  if (strong) {
    double k = 0.0;
    for (const auto& row : rep.srho_table) k = std::max(k, row.estimate.value);
    rep.weak_evidence.holds = true;
    rep.weak_evidence.source = rep.strong_evidence.source;
    rep.weak_evidence.note = "implied by strong qualification";
    rep.strong_evidence.bound_k = k;
    rep.optimal_evidence = check_order_source_pair_tabulated(filter, rho, log_shat, "s_rho (tabulated estimate)",
                                                             default_h(rho), lambda_grid, grid);
  } else {
    rep.optimal_evidence.note = "requires strong qualification";
    rep.optimal_evidence.witnesses = rep.strong_evidence.witnesses;
    struct Candidate {
      std::string name;
      std::vector<double> log_s;
    };
    std::vector<Candidate> candidates;
    bool shat_positive = true;
    std::vector<double> capped;
    for (double ls : log_shat) {
      if (!(std::exp(ls) > kPositivityFloor)) shat_positive = false;
      capped.push_back(std::min(ls, 0.0));
    }
    if (shat_positive) candidates.push_back({"min(s_rho, 1)", capped});
    for (const char* text : {"lambda", "lambda^0.5", "lambda/(1+lambda)"}) {
      SourceFn s = make_source(text);
      candidates.push_back({s.text(), tabulate(s, lambda_grid)});
    }
    for (const auto& c : candidates) {
      PairVerdict v = check_weak_pair_tabulated(filter, c.log_s, c.name, rho, lambda_grid, grid);
      if (v.holds) {
        rep.weak_evidence = v;
        break;
      }
      if (rep.weak_evidence.witnesses.empty()) rep.weak_evidence = v;
    }
    if (!rep.weak_evidence.holds) rep.weak_evidence.note = "no canonical bounded source gives a weak pair";
  }
  rep.level = rep.weak_evidence.holds ? Level::Weak : Level::None;
  if (strong) rep.level = rep.optimal_evidence.holds ? Level::Optimal : Level::Strong;

  rep.classical_mu0 = estimate_classical_order(filter, default_mu_grid(), lambda_grid, grid);
  rep.mp = check_mp_qualification(filter, rho);
  return rep;
}

QualificationReport classify(const FilterFamily& filter, const OrderFn& rho) {
  return classify(filter, rho, default_lambda_grid(filter));
}

std::vector<double> default_construct_lambda_grid(const FilterFamily& filter) {
  double hi = filter.has_lambda_limit() ? 0.99 * filter.lambda_limit() : 1e2;
  return geometric_ascending(1e-8, hi, 8);
}

Construction construct_weak_qualification(const FilterFamily& filter, const std::vector<double>& lambda_grid,
                                          const std::vector<double>& alpha_grid) {
  if (lambda_grid.size() < 2 || alpha_grid.size() < 2) throw InputError("construction needs non-trivial grids");
  Construction c;
  c.lambda = lambda_grid;
  std::sort(c.lambda.begin(), c.lambda.end());
  c.alpha = alpha_grid;
  std::sort(c.alpha.begin(), c.alpha.end(), std::greater<>());
  for (double l : c.lambda) check_lambda(filter, l);
  for (double a : c.alpha)
    if (!(a > 0 && a < filter.alpha_max())) throw ParameterOutOfRange("alpha grid must lie in (0, alpha_max)");

  // Hypotheses of part (b): r > 0 and nonincreasing in λ; g nonincreasing in α.
  const std::size_t nl = c.lambda.size(), na = c.alpha.size();
  std::vector<std::vector<double>> lr(na, std::vector<double>(nl));
  for (std::size_t i = 0; i < na; ++i) {
    const double t = std::log(c.alpha[i]);
    for (std::size_t j = 0; j < nl; ++j) {
      ResidualValue r = filter.kernel().residual(t, c.lambda[j]);
      if (r.sign <= 0) throw HypothesisViolation("residual not positive", c.alpha[i], c.lambda[j]);
      lr[i][j] = r.log_abs;
      if (j && lr[i][j] > lr[i][j - 1] + 1e-12 * std::max(1.0, std::fabs(lr[i][j - 1])))
        throw HypothesisViolation("residual not decreasing in lambda", c.alpha[i], c.lambda[j]);
    }
  }
  for (std::size_t j = 0; j < nl; ++j) {
    for (std::size_t i = 1; i < na; ++i) {
      // c.alpha is descending, so g must not decrease along i.
      double g_big = filter.kernel().g(c.alpha[i - 1], c.lambda[j]);
      double g_small = filter.kernel().g(c.alpha[i], c.lambda[j]);
      if (g_big > g_small * (1 + 1e-12) + 1e-300)
        throw HypothesisViolation("g not decreasing in alpha", c.alpha[i], c.lambda[j]);
    }
  }

  // θ(λ): largest γ with r_γ(λ) ≤ λ and r_α(λ) ≤ λ at every grid α below γ.
  const double t_top = std::log(filter.alpha_max()) + std::log1p(-1e-12);
  const double t_bottom = filter.min_log_alpha();
  for (std::size_t j = 0; j < nl; ++j) {
    const double l = c.lambda[j], ll = std::log(l);
    double bad_min = kInf;
    for (std::size_t i = 0; i < na; ++i)
      if (lr[i][j] > ll) bad_min = std::min(bad_min, std::log(c.alpha[i]));
    auto P = [&](double t) { return log_r(filter, t, l) <= ll && !(bad_min < t); };
    if (!P(t_bottom)) throw ConvergenceFailure("bisection for theta has no admissible lower end at lambda = " + std::to_string(l));
    double lo = t_bottom, hi = t_top;
    if (P(hi)) {
      lo = hi;
    } else {
      int it = 0;
      while (hi - lo > 1e-10) {
        double m = 0.5 * (lo + hi);
        (P(m) ? lo : hi) = m;
        if (++it > 400) throw ConvergenceFailure("bisection for theta did not converge");
      }
    }
    c.theta.push_back(std::exp(lo));
  }
  for (std::size_t j = 1; j + 1 < nl; ++j) {
    double a = c.theta[j - 1], b = c.theta[j], d = c.theta[j + 1];
    if ((b > 10 * a && b > 10 * d) || (10 * b < a && 10 * b < d)) c.theta[j] = std::sqrt(a * d);
  }
  for (std::size_t j = 0; j < nl; ++j) {
    double f = -std::expm1(-c.lambda[j]) * c.theta[j];
    if (j && !(f > c.f.back())) f = c.f.back() * (1 + 1e-9);
    c.f.push_back(f);
  }

  // h = f^{-1}, log-log interpolation, linear through the origin outside the table.
  auto h_of = [&](double a) {
    if (a <= c.f.front()) return c.lambda.front() * a / c.f.front();
    if (a >= c.f.back()) return c.lambda.back() * a / c.f.back();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(c.f.begin(), c.f.end(), a) - c.f.begin());
    double f0 = std::log(c.f[k - 1]), f1 = std::log(c.f[k]);
    double l0 = std::log(c.lambda[k - 1]), l1 = std::log(c.lambda[k]);
    return std::exp(l0 + (std::log(a) - f0) * (l1 - l0) / (f1 - f0));
  };
  std::vector<double> log_z(na), log_star(na);
  for (std::size_t i = 0; i < na; ++i) {
    double h = h_of(c.alpha[i]);
    if (filter.has_lambda_limit()) h = std::min(h, filter.lambda_limit());
    c.h.push_back(h);
    log_z[i] = log_r(filter, std::log(c.alpha[i]), h);
  }
  double run = -kInf;
  for (std::size_t i = na; i-- > 0;) {
    run = std::max(run, log_z[i]);
    log_star[i] = run;
  }
  for (std::size_t i = 0; i < na; ++i) {
    c.z.push_back(std::exp(log_z[i]));
    c.rho_star.push_back(std::exp(log_star[i]));
  }
  c.log_rho_star = log_star;

  // sup of |r| above h(α) against ρ*(α), on the grids.
  PairVerdict& cert = c.certificate;
  cert.h_used = "tabulated inverse of f(lambda) = (1 - exp(-lambda)) theta(lambda)";
  cert.source = "rho_star (running-max envelope of r_alpha(h(alpha)))";
  double k = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double t = std::log(c.alpha[i]);
    double sup = log_z[i];
    double arg = c.h[i];
    for (std::size_t j = 0; j < nl; ++j)
      if (c.lambda[j] >= c.h[i]) {
        double v = lr[i][j];
        if (v > sup) {
          sup = v;
          arg = c.lambda[j];
        }
      }
    (void)t;
    k = std::max(k, std::exp(sup - log_star[i]));
    if (sup > log_star[i] + std::log1p(1e-12) && cert.witnesses.size() < kMaxWitnesses)
      cert.witnesses.push_back({c.alpha[i], arg});
  }
  cert.bound_k = k;
  cert.holds = cert.witnesses.empty();
  return c;
}

Construction construct_weak_qualification(const FilterFamily& filter) {
  std::vector<double> alphas;
  for (double t : base_log_alpha_grid(filter, AlphaGrid{})) alphas.push_back(std::exp(t));
  return construct_weak_qualification(filter, default_construct_lambda_grid(filter), alphas);
}

}  // namespace specreg
