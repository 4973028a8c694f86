#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "doctest.h"
#include "specreg/error.hpp"
#include "specreg/experiments.hpp"

using namespace specreg;

namespace {

const SpectralModel& model200() {
  static const SpectralModel m = make_diagonal_model("j^-2", 200);
  return m;
}

// err(α) for Tikhonov with x_j = λ_j^μ w_j, summed directly.
double tikhonov_err_oracle(double alpha, double mu) {
  const auto& lam = model200().eigenvalues;
  double acc = 0.0;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    double w = std::pow(static_cast<double>(j + 1), -0.6);
    double r = alpha / (alpha + lam[j]);
    double x = std::pow(lam[j], mu) * w;
    acc += r * r * x * x;
  }
  return std::sqrt(acc);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Slope of ln err vs ln α from the oracle over the α values a study uses.
double oracle_slope(const ConvergenceStudy& st, const FitWindow& win, double mu) {
  std::vector<double> x, y;
  for (const auto& r : st.records) {
    if (r.alpha < win.alpha_lo || r.alpha > win.alpha_hi) continue;
    x.push_back(std::log(r.alpha));
    y.push_back(std::log(tikhonov_err_oracle(r.alpha, mu)));
  }
  return ols_slope(x, y);
}

ConvergenceStudy tikhonov_study(const std::string& s) {
  auto f = make_filter("tikhonov");
  auto x = make_source_element(model200(), make_source(s), default_generator(200));
  return run_convergence(model200(), f, x, make_order("alpha"), default_study_alpha_grid(f));
}

double norm(const CoefVector& v) {
  double a = 0;
  for (double x : v) a += x * x;
  return std::sqrt(a);
}

}  // namespace

TEST_CASE("run_convergence: tikhonov matches the direct sum") {
  auto st = tikhonov_study("lambda");
  REQUIRE(st.records.size() > 50);
  double wn = norm(default_generator(200));
  for (std::size_t i = 0; i < st.records.size(); ++i) {
    const auto& r = st.records[i];
    if (i > 0) CHECK(r.alpha < st.records[i - 1].alpha);
    double o = tikhonov_err_oracle(r.alpha, 1.0);
    CHECK(r.err == doctest::Approx(o).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(r.err / r.rho).epsilon(1e-12));
    CHECK(r.ratio <= 1.05 * wn);
  }
  CHECK(st.context.filter_id == "tikhonov");
  CHECK(st.context.x_dagger.size() == 200);
}

TEST_CASE("run_convergence: tsvd is exact below the smallest eigenvalue") {
  auto f = make_filter("tsvd");
  auto x = make_source_element(model200(), make_source("lambda^0.5"), default_generator(200));
  auto st = run_convergence(model200(), f, x, make_order("alpha"), default_study_alpha_grid(f));
  double lmin = model200().eigenvalues.back();
  int below = 0;
  for (const auto& r : st.records) {
    if (r.alpha < lmin) {
      ++below;
      CHECK(r.err == 0.0);
    } else {
      CHECK(r.err > 0.0);
    }
  }
  CHECK(below > 10);
}

TEST_CASE("run_convergence: showalter single mode in the log domain") {
  auto model = make_model({1.0}, {"synthetic-diagonal", "single"});
  auto f = make_filter("showalter");
  SourceElement x{{1.0}, {1.0}, make_source("lambda")};
  std::vector<double> grid;
  for (double a = 0.5; a > 1e-4; a /= 2) grid.push_back(a);
  auto st = run_convergence(model, f, x, make_order("exp(-1/sqrt(alpha))"), grid);
  double prev = INFINITY;
  for (const auto& r : st.records) {
    double expect = -1 / r.alpha + 1 / std::sqrt(r.alpha);
    CHECK(r.log_ratio == doctest::Approx(expect).epsilon(1e-9));
    CHECK(r.log_err == doctest::Approx(-1 / r.alpha).epsilon(1e-9));
    CHECK(r.log_ratio < prev);
    prev = r.log_ratio;
  }
  CHECK(st.records.back().log_ratio < -8000);
}

TEST_CASE("run_convergence: rejects a non-decreasing grid") {
  auto f = make_filter("tikhonov");
  auto x = make_source_element(model200(), make_source("lambda"), default_generator(200));
  CHECK_THROWS_AS(run_convergence(model200(), f, x, make_order("alpha"), {0.1, 0.2}), Error);
}

TEST_CASE("fit_order: tikhonov slopes reproduce the oracle fit") {
  struct Case {
    const char* s;
    double mu;
  };
  for (Case c : {Case{"lambda", 1.0}, Case{"lambda^0.5", 0.5}, Case{"lambda^0.25", 0.25}}) {
    CAPTURE(c.s);
    auto st = tikhonov_study(c.s);
    auto fit = fit_order(st);
    auto win = default_fit_window(st);
    CHECK(fit.window.alpha_lo == win.alpha_lo);
    CHECK(win.alpha_lo == doctest::Approx(10 * model200().eigenvalues.back()));
    CHECK(fit.points >= 8);
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);
    CHECK(fit.slope == doctest::Approx(oracle_slope(st, win, c.mu)).epsilon(1e-6));
  }
  CHECK(fit_order(tikhonov_study("lambda^0.5")).slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("fit_order: slope increases with source smoothness") {
  double a = fit_order(tikhonov_study("lambda^0.25")).slope;
  double b = fit_order(tikhonov_study("lambda^0.5")).slope;
  double c = fit_order(tikhonov_study("lambda")).slope;
  CHECK(a < b);
  CHECK(b < c);
  CHECK(c < 1.0);
}

TEST_CASE("fit_order: constant error gives slope zero") {
  ConvergenceStudy st;
  for (int i = 0; i < 20; ++i) {
    double a = std::pow(10.0, -0.25 * i);
    st.records.push_back({a, 3.0, a, 3.0 / a, std::log(3.0), std::log(a), std::log(3.0 / a)});
  }
  auto fit = fit_order(st, {1e-6, 1.0});
  CHECK(std::abs(fit.slope) < 1e-6);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(fit.points == 20);
}

TEST_CASE("fit_order: preconditions") {
  auto st = tikhonov_study("lambda");
  CHECK_THROWS_AS(fit_order(st, {0.4, 0.5}), PreconditionViolation);
  auto f = make_filter("tsvd");
  auto x = make_source_element(model200(), make_source("lambda"), default_generator(200));
  auto ts = run_convergence(model200(), f, x, make_order("alpha"), default_study_alpha_grid(f));
  CHECK_THROWS_AS(fit_order(ts, {1e-7, 1e-5}), PreconditionViolation);
  ConvergenceStudy flat;
  for (int i = 0; i < 10; ++i) {
    double a = std::pow(10.0, -0.25 * i);
    flat.records.push_back({a, a, 1.0, a, std::log(a), 0.0, std::log(a)});
  }
  CHECK_THROWS_AS(fit_order(flat, {1e-6, 1.0}), PreconditionViolation);
}

TEST_CASE("direct-theorem property: weak pairs give bounded tail ratios") {
  const std::vector<std::string> rhos = {"alpha", "alpha^0.5", "-1/ln(alpha)"};
  const std::vector<std::string> sources = {"lambda", "lambda^0.5", "lambda/(1+lambda)"};
  int checked = 0;
  for (const auto& id : catalog_ids()) {
    auto f = make_filter(id);
    auto grid = default_lambda_grid(f);
    for (const auto& rt : rhos) {
      auto rho = make_order(rt);
      for (const auto& st : sources) {
        auto s = make_source(st);
        PairVerdict v;
        try {
          v = check_weak_pair(f, s, rho, grid);
        } catch (const Error&) {
          continue;
        }
        if (!v.holds) continue;
        CAPTURE(id);
        CAPTURE(rt);
        CAPTURE(st);
        auto x = make_source_element(model200(), s, default_generator(200));
        auto study = run_convergence(model200(), f, x, rho, default_study_alpha_grid(f));
        double mx = 0;
        for (const auto& r : study.records) mx = std::max(mx, r.ratio);
        CHECK(mx < kRatioCap);
        ++checked;
      }
    }
  }
  CHECK(checked >= 10);
}

namespace {

struct Scenario {
  const char* filter;
  const char* rho;
  const char* s;
  const char* x_source;
  bool linear_generator;
  const char* h;
  bool inside;
};

ConverseResult run_scenario(const Scenario& c) {
  auto f = make_filter(c.filter);
  auto rho = make_order(c.rho);
  CoefVector w = default_generator(200);
  if (c.linear_generator)
    for (std::size_t j = 0; j < 200; ++j) w[j] = static_cast<double>(j + 1);
  auto x = make_source_element(model200(), make_source(c.x_source), w);
  auto st = run_convergence(model200(), f, x, rho, default_study_alpha_grid(f));
  std::optional<OrderFn> h;
  if (c.h) h = make_order(c.h);
  return converse_probe(st, f, rho, make_source(c.s), h);
}

}  // namespace

TEST_CASE("converse_probe: six scripted scenarios agree") {
  const std::vector<Scenario> cases = {
      {"tikhonov", "alpha", "lambda", "lambda", false, nullptr, true},
      {"ex3", "exp(-1/alpha)", "lambda/(1+lambda)", "lambda/(1+lambda)", false, "exp(-1/alpha)", true},
      {"ex4", "-1/ln(alpha)", "lambda/(1+lambda)", "lambda/(1+lambda)", false, nullptr, true},
      {"tikhonov", "alpha", "lambda", "lambda", true, nullptr, false},
      {"tikhonov", "alpha", "lambda", "lambda^0.5", false, nullptr, false},
      {"ex4", "-1/ln(alpha)", "lambda/(1+lambda)", "lambda^0.5", false, nullptr, false},
  };
  for (const auto& c : cases) {
    CAPTURE(c.filter);
    CAPTURE(c.x_source);
    CAPTURE(c.linear_generator);
    auto r = run_scenario(c);
    CHECK(r.pair_certificate.holds);
    REQUIRE(r.prediction.has_value());
    CHECK(*r.prediction == c.inside);
    CHECK(r.verification.inside == c.inside);
    CHECK(r.agreement == "agree");
  }
}

TEST_CASE("converse_probe: outside generator makes the ratio blow up") {
  auto r = run_scenario({"tikhonov", "alpha", "lambda", "lambda", true, nullptr, false});
  CHECK_FALSE(r.tail.bounded);
  CHECK(r.tail.max_ratio > 100);
  REQUIRE(r.verification.witness.has_value());
}

TEST_CASE("converse_probe: ex8 declines") {
  auto r = run_scenario({"ex8", "alpha", "lambda^0.5", "lambda^0.5", false, nullptr, true});
  CHECK_FALSE(r.pair_certificate.holds);
  CHECK_FALSE(r.prediction.has_value());
  CHECK(r.agreement == "declined");
}

TEST_CASE("maximal_source_demo: tikhonov candidates") {
  auto f = make_filter("tikhonov");
  auto rep = maximal_source_demo(model200(), f, make_order("alpha"),
                                 {make_source("lambda"), make_source("lambda/(1+lambda)"), make_source("lambda^2"),
                                  make_source("1e13*lambda")});
  REQUIRE(rep.candidates.size() == 4);
  REQUIRE(rep.srho_on_spectrum.size() == 200);
  for (std::size_t j = 0; j < 200; ++j)
    CHECK(rep.srho_on_spectrum[j] == doctest::Approx(model200().eigenvalues[j]).epsilon(1e-2));
  const auto& lam = model200().eigenvalues;
  for (int i = 0; i < 3; ++i) {
    const auto& c = rep.candidates[i];
    CAPTURE(c.source);
    CHECK(c.included);
    REQUIRE(c.k.has_value());
    auto s = make_source(c.source);
    double k = 0;
    for (std::size_t j = 0; j < lam.size(); ++j) k = std::max(k, s(lam[j]) / rep.srho_on_spectrum[j]);
    CHECK(*c.k == doctest::Approx(k).epsilon(1e-9));
    CHECK(*c.k <= 1.01);
    CHECK(c.generators.size() == 3);
    for (const auto& g : c.generators) CHECK(g.inside);
    CHECK(c.inclusion_holds);
  }
  const auto& bad = rep.candidates[3];
  CHECK_FALSE(bad.strong_pair.holds);
  CHECK_FALSE(bad.included);
  CHECK_FALSE(bad.k.has_value());
  CHECK(bad.generators.empty());
  CHECK_FALSE(bad.inclusion_holds);
}

TEST_CASE("maximal_source_demo: ex8 with the square root") {
  auto f = make_filter("ex8", {{"k", 1.0}});
  auto rep = maximal_source_demo(model200(), f, make_order("alpha"), {make_source("lambda^0.5")});
  const auto& c = rep.candidates.at(0);
  CHECK(c.included);
  REQUIRE(c.k.has_value());
  CHECK(*c.k == doctest::Approx(1.0).epsilon(0.02));
  CHECK(c.inclusion_holds);
}

TEST_CASE("maximal_source_demo: pointwise pair without a uniform bound") {
  auto f = make_filter("tikhonov");
  auto rep = maximal_source_demo(model200(), f, make_order("alpha"), {make_source("lambda^0.5")});
  const auto& c = rep.candidates.at(0);
  CHECK(c.included);
  REQUIRE(c.k.has_value());
  CHECK(*c.k == doctest::Approx(std::pow(model200().eigenvalues.back(), -0.5)).epsilon(0.02));
  CHECK_FALSE(c.inclusion_holds);
}

TEST_CASE("maximal_source_demo: requires at least strong qualification") {
  auto f = make_filter("tikhonov");
  CHECK_THROWS_AS(maximal_source_demo(model200(), f, make_order("alpha^2"), {make_source("lambda")}),
                  PreconditionViolation);
}

TEST_CASE("study_to_csv header and rows") {
  auto st = tikhonov_study("lambda");
  auto csv = study_to_csv(st);
  CHECK(csv.rfind("alpha,err,rho,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(st.records.size() + 1));
}
