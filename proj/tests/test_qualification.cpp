#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "specreg/error.hpp"
#include "specreg/grid.hpp"
#include "specreg/limits.hpp"
#include "specreg/qualification.hpp"

using namespace specreg;

namespace {

TailPlan synthetic_plan() { return {std::log(0.5), std::log(1e-7), 64, -700.0, false}; }

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

}  // namespace

TEST_CASE("tail estimator on synthetic sequences") {
  auto plan = synthetic_plan();
  auto c = estimate_tail_limit(LimitKind::Liminf, [](double) { return TailSample{std::log(3.0), 0}; }, plan);
  CHECK(c.value == doctest::Approx(3.0));
  CHECK(c.stabilized);
  CHECK(c.tail_min <= c.value);
  CHECK(c.value <= c.tail_max);

  auto up = estimate_tail_limit(LimitKind::Limsup, [](double t) { return TailSample{-t, 0}; }, plan);
  CHECK(up.value == HUGE_VAL);
  CHECK_FALSE(up.finite());

  auto down = estimate_tail_limit(LimitKind::Liminf, [](double t) { return TailSample{t, 0}; }, plan);
  CHECK(down.value < kPositivityFloor);
  CHECK_FALSE(down.positive());

  // 2 + sin(1/α): liminf 1, limsup 3
  auto osc_plan = plan;
  osc_plan.per_decade = 512;
  auto lo = estimate_tail_limit(
      LimitKind::Liminf, [](double t) { return TailSample{std::log(2 + std::sin(std::exp(-t))), 0}; }, osc_plan);
  auto hi = estimate_tail_limit(
      LimitKind::Limsup, [](double t) { return TailSample{std::log(2 + std::sin(std::exp(-t))), 0}; }, osc_plan);
  CHECK(lo.value == doctest::Approx(1.0).epsilon(0.01));
  CHECK(hi.value == doctest::Approx(3.0).epsilon(0.01));

  // 1 + 1/|ln α| converges slowly to 1
  auto slow = estimate_tail_limit(LimitKind::Liminf, [](double t) { return TailSample{std::log1p(-1 / t), 0}; }, plan);
  CHECK(slow.value < 1.1);
  CHECK(slow.value >= 1.0);
}

TEST_CASE("estimate_srho examples") {
  auto e1 = estimate_srho(make_filter("tikhonov"), make_order("alpha"), 2.0);
  CHECK(rel(e1.value, 2.0) < 0.01);
  CHECK(e1.stabilized);
  auto e3 = estimate_srho(make_filter("ex3_exp"), make_order("exp(-1/alpha)"), 1.0);
  CHECK(rel(e3.value, 0.5) < 0.01);
  auto e2 = estimate_srho(make_filter("tsvd"), make_order("alpha"), 1.0);
  CHECK(e2.value == HUGE_VAL);
  CHECK_THROWS_AS(estimate_srho(make_filter("tikhonov"), make_order("alpha"), 0.0), ParameterOutOfRange);
  CHECK_THROWS_AS(estimate_srho(make_filter("tikhonov"), make_order("1+alpha"), 1.0), Uncertified);
}

TEST_CASE("s_rho closed forms at lambda in {0.01, 0.1, 1, 10}") {
  struct Case {
    const char* filter;
    const char* rho;
    double (*s)(double);
  };
  const Case cases[] = {
      {"tikhonov", "alpha", [](double l) { return l; }},
      {"ex3_exp", "exp(-1/alpha)", [](double l) { return l / (1 + l); }},
      {"ex4_log", "-1/ln(alpha)", [](double l) { return l / (1 + l); }},
      {"ex8_osc", "alpha", [](double l) { return std::sqrt(l); }},
      {"ex9_osc", "exp(-1/sqrt(alpha))", [](double l) { return std::sqrt(l); }},
      {"ex10_osc", "-1/ln(alpha)", [](double l) { return std::sqrt(l); }},
  };
  for (const auto& c : cases) {
    auto f = make_filter(c.filter);
    auto rho = make_order(c.rho);
    for (double l : {0.01, 0.1, 1.0, 10.0}) {
      auto e = estimate_srho(f, rho, l);
      INFO(c.filter << " lambda=" << l << " got " << e.value);
      CHECK(rel(e.value, c.s(l)) < 0.02);
      CHECK(e.stabilized);
    }
  }
}

TEST_CASE("weak pair examples") {
  auto grid = default_lambda_grid(make_filter("tikhonov"));
  auto t = check_weak_pair(make_filter("tikhonov"), make_source("lambda"), make_order("alpha"), grid);
  CHECK(t.holds);
  REQUIRE(t.bound_k);
  CHECK(*t.bound_k <= 1.0 + 1e-9);
  CHECK(t.witnesses.empty());
  CHECK(check_weak_pair(make_filter("tikhonov"), make_source("lambda"), make_order("alpha^0.5"), grid).holds);
  auto f4 = make_filter("ex4_log");
  auto bad = check_weak_pair(f4, make_source("lambda"), make_order("alpha"), default_lambda_grid(f4));
  CHECK_FALSE(bad.holds);
  CHECK_FALSE(bad.witnesses.empty());
}

TEST_CASE("strong pair examples") {
  auto f = make_filter("tikhonov");
  auto grid = default_lambda_grid(f);
  CHECK(check_strong_pair(f, make_source("lambda"), make_order("alpha"), grid).holds);
  for (const char* s : {"lambda", "lambda^0.5", "lambda/(1+lambda)"})
    CHECK_FALSE(check_strong_pair(f, make_source(s), make_order("alpha^0.5"), grid).holds);
  auto f8 = make_filter("ex8_osc", {{"k", 1.0}});
  CHECK(check_strong_pair(f8, make_source("lambda^0.5"), make_order("alpha"), default_lambda_grid(f8)).holds);
}

TEST_CASE("order-source pair examples") {
  auto f = make_filter("tikhonov");
  auto v = check_order_source_pair(f, make_order("alpha"), make_source("lambda"), make_order("alpha"),
                                   default_lambda_grid(f));
  CHECK(v.holds);
  REQUIRE(v.gamma);
  CHECK(*v.gamma >= 0.5 - 1e-9);

  auto f4 = make_filter("ex4_log");
  auto w = check_order_source_pair(f4, make_order("-1/ln(alpha)"), make_source("lambda/(1+lambda)"),
                                   make_order("-1/ln(alpha)"), default_lambda_grid(f4));
  CHECK(w.holds);
  REQUIRE(w.gamma);
  CHECK(*w.gamma >= 0.5 - 1e-9);

  auto f8 = make_filter("ex8_osc", {{"k", 1.0}});
  auto x = check_order_source_pair(f8, make_order("alpha"), make_source("lambda^0.5"), make_order("alpha"),
                                   default_lambda_grid(f8));
  CHECK_FALSE(x.holds);
  CHECK_FALSE(x.witnesses.empty());
}

TEST_CASE("classify examples") {
  CHECK(classify(make_filter("tikhonov"), make_order("alpha")).level == Level::Optimal);
  CHECK(classify(make_filter("ex9_osc"), make_order("exp(-1/sqrt(alpha))")).level == Level::Strong);
  for (const char* r : {"alpha", "alpha^2", "exp(-1/alpha)", "-1/ln(alpha)"})
    CHECK(classify(make_filter("tsvd"), make_order(r)).level == Level::Weak);
  CHECK_THROWS_AS(classify(make_filter("tikhonov"), make_order("1+alpha")), Uncertified);
}

TEST_CASE("hierarchy: evidence backs every claimed level") {
  struct Case {
    const char* f;
    const char* rho;
  };
  const Case cases[] = {{"tikhonov", "alpha"},     {"tikhonov", "alpha^0.5"}, {"tikhonov", "alpha^2"},
                        {"showalter", "alpha"},    {"ex4_log", "alpha"},      {"ex7_piecewise", "alpha"},
                        {"ex3_exp", "exp(-1/alpha)"}, {"landweber", "alpha"}};
  for (const auto& c : cases) {
    auto r = classify(make_filter(c.f), make_order(c.rho));
    INFO(c.f << " " << c.rho << " -> " << to_string(r.level));
    if (r.level == Level::Optimal) CHECK(r.optimal_evidence.holds);
    if (r.level >= Level::Strong) CHECK(r.strong_evidence.holds);
    if (r.level >= Level::Weak) CHECK(r.weak_evidence.holds);
    if (r.level == Level::Strong) CHECK_FALSE(r.optimal_evidence.holds);
  }
}

TEST_CASE("classical order examples") {
  auto t = estimate_classical_order(make_filter("tikhonov"));
  CHECK(t.low == 1.0);
  CHECK(t.high == 2.0);
  CHECK_FALSE(t.zero);
  CHECK_FALSE(t.infinite);
  CHECK(estimate_classical_order(make_filter("ex3_exp")).infinite);
  CHECK(estimate_classical_order(make_filter("ex4_log")).zero);
  for (double k : {0.5, 1.0, 2.0}) {
    auto m = estimate_classical_order(make_filter("ex8_osc", {{"k", k}}));
    CHECK(m.low == k);
    CHECK(m.high == 2 * k);
  }
}

TEST_CASE("ex7: not strong although mu0 brackets 1") {
  auto f = make_filter("ex7_piecewise");
  auto r = classify(f, make_order("alpha"));
  CHECK(r.level < Level::Strong);
  CHECK(r.classical_mu0.low <= 1.0);
  CHECK(r.classical_mu0.high > 1.0);
}

TEST_CASE("MP examples") {
  auto t = check_mp_qualification(make_filter("tikhonov"), make_order("alpha"));
  CHECK(t.passes);
  REQUIRE(t.gamma);
  CHECK(*t.gamma <= 1.0 + 1e-6);
  auto s = check_mp_qualification(make_filter("showalter"), make_order("exp(-1/sqrt(alpha))"));
  CHECK_FALSE(s.passes);
  CHECK(s.witness_alpha.has_value());
  CHECK(s.growth > 100);
  for (const char* r : {"alpha", "alpha^2", "exp(-1/alpha)"})
    CHECK(check_mp_qualification(make_filter("tsvd"), make_order(r)).passes);
}

TEST_CASE("MP sup oracle for tikhonov: sup_l alpha*l/(alpha+l) <= alpha") {
  auto f = make_filter("tikhonov");
  auto rho = make_order("alpha");
  std::vector<double> ag = {0.3, 0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4, 3e-5, 1e-5};
  auto v = check_mp_qualification(f, rho, 1.0, geometric_ascending(1e-9, 1.0, 32), ag);
  REQUIRE(v.gamma);
  double oracle = 0;
  for (double a : ag)
    for (double l : geometric_ascending(1e-9, 1.0, 32)) oracle = std::max(oracle, a * l / (a + l) / a);
  CHECK(*v.gamma >= oracle * (1 - 1e-12));
  CHECK(*v.gamma <= 1.0);
}

namespace {

// Certificate oracle: sup over a dense λ sweep above h(α) of the closed-form residual.
void check_certificate_oracle(const Construction& c, double (*r)(double, double)) {
  REQUIRE(c.alpha.size() == c.h.size());
  REQUIRE(c.alpha.size() == c.rho_star.size());
  for (std::size_t i = 0; i < c.alpha.size(); i += 7) {
    double a = c.alpha[i], h = c.h[i];
    double sup = 0;
    for (double l = h; l <= 1e2; l *= 1.01) sup = std::max(sup, std::fabs(r(a, l)));
    INFO("alpha=" << a << " h=" << h);
    CHECK(sup <= c.rho_star[i] * (1 + 1e-9) + 1e-300);
  }
  for (std::size_t i = 1; i < c.rho_star.size(); ++i) CHECK(c.rho_star[i] <= c.rho_star[i - 1]);
}

}  // namespace

TEST_CASE("construct: showalter and tikhonov certificates hold") {
  auto s = construct_weak_qualification(make_filter("showalter"));
  CHECK(s.certificate.holds);
  check_certificate_oracle(s, [](double a, double l) { return std::exp(-l / a); });
  auto t = construct_weak_qualification(make_filter("tikhonov"));
  CHECK(t.certificate.holds);
  check_certificate_oracle(t, [](double a, double l) { return a / (a + l); });
  for (std::size_t i = 1; i < t.lambda.size(); ++i) CHECK(t.f[i] > t.f[i - 1]);
}

TEST_CASE("construct: ex8 violates the hypotheses") {
  try {
    construct_weak_qualification(make_filter("ex8_osc", {{"k", 1.0}}));
    FAIL("expected hypothesis violation");
  } catch (const HypothesisViolation& e) {
    CHECK(e.alpha() > 0);
    CHECK(e.lambda() > 0);
    // r at the witness exceeds r at some smaller λ, so r is not decreasing there
    auto f = make_filter("ex8_osc", {{"k", 1.0}});
    double r0 = eval_residual(f, e.alpha(), e.lambda()).value;
    double lowest = r0;
    for (double l = e.lambda() / 2; l < e.lambda(); l *= 1.001)
      lowest = std::min(lowest, eval_residual(f, e.alpha(), l).value);
    CHECK(lowest < r0);
  }
}

TEST_CASE("order monotonicity of weak pairs") {
  auto f = make_filter("tikhonov");
  auto grid = default_lambda_grid(f);
  std::vector<OrderFn> rhos = {make_order("alpha^2"), make_order("alpha"), make_order("alpha^0.5"),
                               make_order("-1/ln(alpha)")};
  std::vector<SourceFn> ss = {make_source("lambda"), make_source("lambda^2"), make_source("lambda/(1+lambda)")};
  for (const auto& s : ss)
    for (const auto& r1 : rhos) {
      if (!check_weak_pair(f, s, r1, grid).holds) continue;
      for (const auto& r2 : rhos)
        if (precedes(r1, r2).holds) {
          INFO(s.text() << " " << r1.text() << " -> " << r2.text());
          CHECK(check_weak_pair(f, s, r2, grid).holds);
        }
    }
}

TEST_CASE("source domination under strong pairs") {
  struct Case {
    const char* f;
    const char* rho;
  };
  for (const Case& c : {Case{"tikhonov", "alpha"}, Case{"ex3_exp", "exp(-1/alpha)"}, Case{"ex4_log", "-1/ln(alpha)"}}) {
    auto f = make_filter(c.f);
    auto rho = make_order(c.rho);
    auto grid = default_lambda_grid(f);
    for (const char* st : {"lambda", "lambda/(1+lambda)", "lambda^2"}) {
      auto s = make_source(st);
      if (!check_strong_pair(f, s, rho, grid).holds) continue;
      double k = 0;
      for (double l : grid) k = std::max(k, s(l) / estimate_srho(f, rho, l).value);
      INFO(c.f << " " << st);
      CHECK(k < kDivergenceCap);
    }
  }
}

TEST_CASE("uniqueness: tabulated s_rho is equivalent to the closed form near 0") {
  struct Case {
    const char* f;
    const char* rho;
    double (*s)(double);
  };
  const Case cases[] = {{"tikhonov", "alpha", [](double l) { return l; }},
                        {"ex3_exp", "exp(-1/alpha)", [](double l) { return l / (1 + l); }},
                        {"ex4_log", "-1/ln(alpha)", [](double l) { return l / (1 + l); }}};
  for (const auto& c : cases) {
    auto f = make_filter(c.f);
    auto rho = make_order(c.rho);
    std::vector<double> xs, a, b;
    for (double l = 1.0; l >= 1e-4; l /= std::sqrt(10.0)) {
      xs.push_back(l);
      a.push_back(std::log(estimate_srho(f, rho, l).value));
      b.push_back(std::log(c.s(l)));
    }
    INFO(c.f);
    CHECK(equivalent_samples(xs, a, b).holds);
  }
}

TEST_CASE("strong-but-not-optimal signature at lambda = 1") {
  auto f = make_filter("ex8_osc", {{"k", 1.0}});
  auto rho = make_order("alpha");
  double s = estimate_srho(f, rho, 1.0).value;
  auto hi = estimate_pair_ratio(f, std::log(s), rho, 1.0, LimitKind::Limsup);
  auto lo = estimate_pair_ratio(f, std::log(s), rho, 1.0, LimitKind::Liminf);
  CHECK(hi.value >= 0.9);
  CHECK(hi.value <= 1.1);
  CHECK(lo.value < 0.1);
}

TEST_CASE("report labels a failed optimality search as no certificate found") {
  auto r = classify(make_filter("ex9_osc"), make_order("exp(-1/sqrt(alpha))"));
  CHECK_FALSE(r.optimal_evidence.holds);
  CHECK(r.optimal_evidence.note.find("no certificate found") != std::string::npos);
}
