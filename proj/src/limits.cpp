#include "specreg/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"

namespace specreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWindowTol = 0.05;
constexpr double kExtensionTol = 0.01;
constexpr double kPrecision = 1e11;
constexpr int kMaxRounds = 64;

double movement(double a, double b) {
  if (a == b) return 0.0;
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return std::fabs(std::expm1(b - a));
}

bool imprecise(const TailSample& s) {
  return std::isfinite(s.scale) && s.scale > kPrecision * std::max(1.0, std::fabs(s.log_value));
}

}  // namespace

std::string to_string(LimitKind k) { return k == LimitKind::Liminf ? "liminf" : "limsup"; }

std::string to_string(Trend t) {
  switch (t) {
    case Trend::Growing: return "growing";
    case Trend::Decaying: return "decaying";
    default: return "steady";
  }
}

bool LimitEstimate::finite() const {
  return value < kDivergenceCap && !(!stabilized && trend == Trend::Growing);
}

bool LimitEstimate::positive() const {
  return value > kPositivityFloor && !(!stabilized && trend == Trend::Decaying);
}

TailPlan make_tail_plan(const FilterFamily& filter, const AlphaGrid& grid) {
  TailPlan p;
  double amax = grid.max > 0 ? grid.max : filter.alpha_max() / 2.0;
  if (!(amax < filter.alpha_max())) throw ParameterOutOfRange("alpha grid must lie below alpha_max");
  if (!(grid.min > 0 && grid.min < amax)) throw ParameterOutOfRange("alpha grid needs 0 < min < max");
  p.log_alpha_max = std::log(amax);
  p.log_alpha_min = std::log(grid.min);
  p.per_decade = grid.per_decade > 0 ? grid.per_decade : (filter.oscillatory() ? 512 : 64);
  p.log_alpha_floor = std::min(filter.min_log_alpha(), p.log_alpha_min);
  p.geometric_deep = !filter.oscillatory();
  return p;
}

std::vector<double> base_log_alpha_grid(const TailPlan& plan) {
  return log_points_desc(plan.log_alpha_max, plan.log_alpha_min, plan.per_decade);
}

std::vector<double> base_log_alpha_grid(const FilterFamily& filter, const AlphaGrid& grid) {
  return base_log_alpha_grid(make_tail_plan(filter, grid));
}

LimitEstimate estimate_tail_limit(LimitKind kind, const TailFn& f, const TailPlan& plan) {
  const bool inf_kind = kind == LimitKind::Liminf;
  const double step = std::log(10.0) / plan.per_decade;
  const double log_cap = std::log(kDivergenceCap);
  const double log_floor = std::log(kPositivityFloor);

  std::vector<double> ts, vs;
  bool exhausted = false;
  auto add = [&](double t) {
    TailSample s = f(t);
    if (std::isnan(s.log_value)) throw DomainError("undefined ratio at ln alpha = " + std::to_string(t));
    if (imprecise(s) && ts.size() > 8) {
      exhausted = true;
      return false;
    }
    ts.push_back(t);
    vs.push_back(s.log_value);
    return true;
  };
  for (double t : base_log_alpha_grid(plan)) {
    if (!add(t)) break;
  }

  LimitEstimate est;
  est.kind = kind;
  double prev_E = kInf, prev_emove = kInf;
  bool prev_zero = false, prev_cap = false;
  std::vector<double> history;
  for (int round = 0; round < kMaxRounds; ++round) {
    const double T = ts.back();
    const double mid = 0.5 * (plan.log_alpha_max + T);
    const double quarter = 0.5 * (mid + T);
    double E = inf_kind ? kInf : -kInf, E2 = E;
    double wmin = kInf, wmax = -kInf;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] > mid) continue;
      double v = vs[i];
      wmin = std::min(wmin, v);
      wmax = std::max(wmax, v);
      if (ts[i] <= quarter) E2 = inf_kind ? std::min(E2, v) : std::max(E2, v);
    }
    E = inf_kind ? wmin : wmax;
    history.push_back(E);

    const double wmove = movement(E, E2);
    const double emove = round == 0 ? kInf : movement(prev_E, E);
    const bool zero_now = wmax < log_floor;
    const bool cap_now = E > log_cap;
    const bool last = exhausted || T <= plan.log_alpha_floor;

    est.value = std::exp(E);
    est.tail_min = std::exp(wmin);
    est.tail_max = std::exp(wmax);
    est.window_movement = wmove;
    est.extension_movement = emove;
    est.grid_meta = {std::exp(plan.log_alpha_max), T, plan.per_decade, round + 1, ts.size(), last};

    if (zero_now && (prev_zero || last)) {
      est.stabilized = true;
      return est;
    }
    if (cap_now && (prev_cap || last)) {
      est.value = kInf;
      est.stabilized = true;
      return est;
    }
    const bool quiet = emove < kExtensionTol && (prev_emove < kExtensionTol || last);
    if (!zero_now && !cap_now && wmove < kWindowTol && (quiet || (last && round == 0))) {
      est.stabilized = true;
      return est;
    }
    if (last) break;
    prev_E = E;
    prev_emove = emove;
    prev_zero = zero_now;
    prev_cap = cap_now;

    // extend toward the next depth
    const double target = std::max(plan.log_alpha_floor, 2.0 * T);
    double t = T;
    while (t > target) {
      double dt = step;
      if (plan.geometric_deep) dt = std::max(step, std::fabs(t) * (std::exp2(1.0 / 32) - 1.0));
      t = std::max(target, t - dt);
      if (!add(t)) break;
    }
  }
  est.stabilized = false;
  if (history.size() >= 2) {
    double d = history.back() - history[history.size() - 2];
    if (d > 0.01 || history.back() == kInf) est.trend = Trend::Growing;
    else if (d < -0.01 || history.back() == -kInf) est.trend = Trend::Decaying;
  }
  return est;
}

}  // namespace specreg
