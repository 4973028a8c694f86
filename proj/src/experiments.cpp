#include "specreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/grid.hpp"

namespace specreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_exp(double x) { return x == -kInf ? 0.0 : std::exp(x); }

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::vector<double> default_study_alpha_grid(const FilterFamily& filter) {
  double hi = std::min(0.5, filter.alpha_max() / 2);
  std::vector<double> out;
  for (double t : log_points_desc(std::log(hi), std::log(1e-7), 16)) out.push_back(std::exp(t));
  return out;
}

ConvergenceStudy run_convergence(const SpectralModel& model, const FilterFamily& filter, const SourceElement& source,
                                 const OrderFn& rho, const std::vector<double>& alpha_grid) {
  if (!rho.certified()) throw Uncertified("order function '" + rho.text() + "' is not certified");
  if (alpha_grid.empty()) throw InputError("empty alpha grid");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    if (!(alpha_grid[i] < alpha_grid[i - 1])) throw InputError("alpha grid must be strictly decreasing");
  ConvergenceStudy st;
  st.context = {filter.id(), model.provenance, source.source.text(), rho.text(), model, source.x_dagger};
  for (double a : alpha_grid) {
    if (!(a > 0 && a < filter.alpha_max())) throw ParameterOutOfRange("alpha outside (0, alpha_max)");
    double t = std::log(a);
    StudyRecord r;
    r.alpha = a;
    r.log_err = log_regularization_error(model, filter, t, source.x_dagger);
    r.log_rho = rho.log_at(t);
    r.log_ratio = r.log_err - r.log_rho;
    r.err = safe_exp(r.log_err);
    r.rho = safe_exp(r.log_rho);
    r.ratio = safe_exp(r.log_ratio);
    st.records.push_back(r);
  }
  return st;
}

FitWindow default_fit_window(const ConvergenceStudy& study) {
  if (study.records.empty()) throw InputError("empty study");
  double lo = study.records.back().alpha, hi = study.records.front().alpha;
  if (!study.context.model.eigenvalues.empty()) lo = std::max(lo, 10 * study.context.model.eigenvalues.back());
  return {lo, hi};
}

SlopeFit fit_order(const ConvergenceStudy& study, const FitWindow& window) {
  std::vector<double> xs, ys;
  for (const auto& r : study.records) {
    if (r.alpha < window.alpha_lo || r.alpha > window.alpha_hi) continue;
    if (r.log_err == -kInf) throw PreconditionViolation("zero error inside the fit window");
    xs.push_back(r.log_rho);
    ys.push_back(r.log_err);
  }
  if (xs.size() < 8) throw PreconditionViolation("fewer than 8 records in the fit window");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw PreconditionViolation("rho is constant over the fit window");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (f.intercept + f.slope * xs[i]);
    ssr += e * e;
  }
  f.r_squared = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  f.window = window;
  f.points = xs.size();
  return f;
}

SlopeFit fit_order(const ConvergenceStudy& study) { return fit_order(study, default_fit_window(study)); }

TailDiagnostics tail_diagnostics(const ConvergenceStudy& study) {
  TailDiagnostics d;
  FitWindow w = default_fit_window(study);
  for (const auto& r : study.records)
    if (r.alpha >= w.alpha_lo && r.alpha <= w.alpha_hi) d.max_ratio = std::max(d.max_ratio, r.ratio);
  d.fit = fit_order(study, w);
  FitWindow deep{w.alpha_lo, std::min(w.alpha_hi, w.alpha_lo * 10 * (1 + 1e-9))};
  try {
    d.deep_fit = fit_order(study, deep);
  } catch (const PreconditionViolation&) {
    d.deep_fit = d.fit;
  }
  d.bounded = d.max_ratio < kRatioCap && d.deep_fit.slope >= kBoundedSlope;
  return d;
}

ConverseResult converse_probe(const ConvergenceStudy& study, const FilterFamily& filter, const OrderFn& rho,
                              const SourceFn& s, const std::optional<OrderFn>& h) {
  if (study.context.x_dagger.empty()) throw PreconditionViolation("study context carries no x-dagger");
  ConverseResult out;
  out.pair_certificate = check_order_source_pair(filter, rho, s, h, default_lambda_grid(filter));
  out.verification = membership_probe(study.context.model, study.context.x_dagger, s);
  out.tail = tail_diagnostics(study);
  if (!out.pair_certificate.holds) {
    out.agreement = "declined";
    return out;
  }
  out.prediction = out.tail.bounded;
  out.agreement = *out.prediction == out.verification.inside ? "agree" : "disagree";
  return out;
}

MaximalSourceReport maximal_source_demo(const SpectralModel& model, const FilterFamily& filter, const OrderFn& rho,
                                        const std::vector<SourceFn>& candidates) {
  MaximalSourceReport rep;
  rep.filter_id = filter.id();
  rep.rho = rho.text();
  QualificationReport q = classify(filter, rho);
  rep.level = q.level;
  if (q.level != Level::Strong && q.level != Level::Optimal)
    throw PreconditionViolation(filter.id() + " with rho = " + rho.text() + " is only " + to_string(q.level));

  const std::size_t n = model.dim();
  std::vector<double> log_srho(n);
  for (std::size_t j = 0; j < n; ++j) {
    LimitEstimate e = estimate_srho(filter, rho, model.eigenvalues[j]);
    if (!e.finite() || !e.positive())
      throw PreconditionViolation("s_rho estimate not finite and positive on the spectrum");
    log_srho[j] = std::log(e.value);
    rep.srho_on_spectrum.push_back(e.value);
  }

  std::vector<std::pair<std::string, CoefVector>> gens;
  gens.emplace_back("j^-0.6", default_generator(n));
  CoefVector e1(n, 0.0);
  e1[0] = 1.0;
  gens.emplace_back("e1", e1);
  CoefVector alt(n);
  for (std::size_t j = 0; j < n; ++j) alt[j] = (j % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(j + 1);
  gens.emplace_back("(-1)^j/j", alt);

  for (const auto& s : candidates) {
    CandidateResult c;
    c.source = s.text();
    c.strong_pair = check_strong_pair(filter, s, rho, default_lambda_grid(filter));
    c.included = c.strong_pair.holds;
    if (c.included) {
      double k = 0;
      for (std::size_t j = 0; j < n; ++j)
        k = std::max(k, std::exp(s.log_at(std::log(model.eigenvalues[j])) - log_srho[j]));
      c.k = k;
      c.inclusion_holds = true;
      for (const auto& [name, w] : gens) {
        SourceElement x = make_source_element(model, s, w);
        Membership m = membership_probe_log(x.x_dagger, log_srho);
        c.generators.push_back({name, m.inside, m.witness});
        c.inclusion_holds = c.inclusion_holds && m.inside;
      }
    }
    rep.candidates.push_back(std::move(c));
  }
  return rep;
}

std::string study_to_csv(const ConvergenceStudy& study) {
  std::ostringstream os;
  os << "alpha,err,rho,ratio\n";
  for (const auto& r : study.records)
    os << fmt(r.alpha) << ',' << fmt(r.err) << ',' << fmt(r.rho) << ',' << fmt(r.ratio) << '\n';
  return os.str();
}

}  // namespace specreg
