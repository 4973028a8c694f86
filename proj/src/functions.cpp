#include "specreg/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"

namespace specreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDepth = 1e300;
constexpr int kPerDoubling = 8;

double log_value(const FuncExpr& e, double log_x) {
  LogReal v = e.eval_log_domain(log_x);
  if (v.sign < 0) return std::numeric_limits<double>::quiet_NaN();
  return v.log_mag;  // -inf for zero
}

// Points strictly beyond t0 (more negative), doubling |t| with kPerDoubling steps each.
template <class F>
bool extend_until(double t0, F&& visit) {
  double t = t0;
  while (std::fabs(t) < kMaxDepth) {
    double next = t * 2.0;
    for (int j = 1; j <= kPerDoubling; ++j) {
      double tj = t * std::pow(2.0, static_cast<double>(j) / kPerDoubling);
      if (visit(tj)) return true;
    }
    t = next;
  }
  return false;
}

void require_variable(const FuncExpr& e, const char* name) {
  if (e.variable_name() && *e.variable_name() != name)
    throw InputError(std::string("expression must be in '") + name + "', got '" + *e.variable_name() + "'");
}

}  // namespace

OrderFn::OrderFn(FuncExpr expr, std::optional<FuncExpr> log_expr, bool certified, CertificationInfo info)
    : expr_(std::move(expr)), log_expr_(std::move(log_expr)), certified_(certified), info_(std::move(info)) {}

double OrderFn::log_at(double log_alpha) const {
  if (log_expr_) return log_expr_->eval_log_domain(log_alpha).to_double();
  LogReal v = expr_.eval_log_domain(log_alpha);
  if (v.sign < 0) throw DomainError("order function negative at ln alpha = " + std::to_string(log_alpha));
  return v.log_mag;
}

LogFn OrderFn::as_log_fn() const {
  return [self = *this](double t) { return self.log_at(t); };
}

SourceFn::SourceFn(FuncExpr expr, bool certified, CertificationInfo info)
    : expr_(std::move(expr)), certified_(certified), info_(std::move(info)) {}

double SourceFn::log_at(double log_lambda) const {
  LogReal v = expr_.eval_log_domain(log_lambda);
  if (v.sign < 0) throw DomainError("source function negative at ln lambda = " + std::to_string(log_lambda));
  return v.log_mag;
}

double SourceFn::operator()(double lambda) const {
  if (lambda == 0.0) return expr_.eval_log_domain(-kInf).to_double();
  return expr_.eval(lambda);
}

LogFn SourceFn::as_log_fn() const {
  return [self = *this](double t) { return self.log_at(t); };
}

OrderFn certify_order_fn(const FuncExpr& expr, const CertGrid& grid) {
  require_variable(expr, "alpha");
  std::optional<FuncExpr> log_expr;
  if (auto* u = std::get_if<Node::Unary>(&expr.root()->v); u && u->op == UnaryOp::Exp)
    log_expr = FuncExpr(u->child);

  CertificationInfo info;
  auto ln_rho = [&](double t) { return log_expr ? log_expr->eval_log_domain(t).to_double() : log_value(expr, t); };
  auto pts = log_points_desc(std::log(grid.max), std::log(grid.min), grid.per_decade);
  double prev = kInf;
  double top = 0.0;
  auto visit = [&](double t) {
    double L = ln_rho(t);
    info.depth = t;
    if (std::isnan(L) || L == -kInf) {
      if (info.failure.empty()) info.failure = "rho not positive at alpha = exp(" + std::to_string(t) + ")";
      info.positive = false;
      return true;
    }
    if (L > prev + 1e-12 * std::max(1.0, std::fabs(prev))) {
      if (info.failure.empty()) info.failure = "rho decreases toward alpha = exp(" + std::to_string(t) + ")";
      info.monotone = false;
      return true;
    }
    prev = L;
    return false;
  };
  for (double t : pts) {
    if (visit(t)) break;
    if (t == pts.front()) top = prev;
  }
  if (info.positive && info.monotone) {
    auto decayed = [&] { return prev < top + std::log(1e-3) || prev < std::log(1e-6); };
    if (!decayed()) {
      info.decays = extend_until(pts.back(), [&](double t) { return visit(t) || decayed(); }) &&
                    info.positive && info.monotone && decayed();
      if (!info.decays && info.failure.empty()) info.failure = "rho does not tend to 0";
    }
  }
  bool ok = info.positive && info.monotone && info.decays;
  return OrderFn(expr, std::move(log_expr), ok, std::move(info));
}

SourceFn certify_source_fn(const FuncExpr& expr, const CertGrid& grid) {
  require_variable(expr, "lambda");
  CertificationInfo info;
  auto pts = log_points_desc(std::log(grid.max), std::log(grid.min), grid.per_decade);
  double top = -kInf, prev = kInf;
  for (double t : pts) {
    double L = log_value(expr, t);
    info.depth = t;
    if (std::isnan(L) || L == -kInf) {
      info.positive = false;
      info.failure = "s not positive at lambda = exp(" + std::to_string(t) + ")";
      break;
    }
    if (prev != kInf && std::fabs(L - prev) > std::log(10.0)) {
      info.continuous = false;
      if (info.failure.empty()) info.failure = "jump larger than 10x near lambda = exp(" + std::to_string(t) + ")";
    }
    top = std::max(top, L);
    prev = L;
  }
  if (info.positive) {
    auto decayed = [&] { return prev < top + std::log(1e-3); };
    if (!decayed()) {
      info.decays = extend_until(pts.back(), [&](double t) {
        double L = log_value(expr, t);
        info.depth = t;
        if (std::isnan(L) || L == -kInf) {
          info.positive = false;
          return true;
        }
        prev = L;
        return decayed();
      });
      info.decays = info.decays && info.positive;
      if (!info.decays && info.failure.empty()) info.failure = "s(lambda) does not tend to 0 at the origin";
    }
  }
  bool ok = info.positive && info.decays && info.continuous;
  return SourceFn(expr, ok, std::move(info));
}

OrderFn make_order(const std::string& text, const CertGrid& grid) {
  return certify_order_fn(FuncExpr::parse(text), grid);
}

SourceFn make_source(const std::string& text, const CertGrid& grid) {
  return certify_source_fn(FuncExpr::parse(text), grid);
}

double eval_log(const OrderFn& order, double alpha) {
  if (!(alpha > 0)) throw DomainError("alpha must be positive");
  return order.log_at(std::log(alpha));
}

Precedence precedes_samples(const std::vector<double>& x, const std::vector<double>& lf1,
                            const std::vector<double>& lf2) {
  const std::size_t n = x.size();
  if (n < 2 || lf1.size() != n || lf2.size() != n) throw InputError("comparator needs matching samples");
  std::vector<double> R(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = lf1[i] - lf2[i];
    if (std::isnan(d)) d = lf1[i] == lf2[i] ? 0.0 : (lf1[i] > lf2[i] ? kInf : -kInf);
    R[i] = d;
  }
  const std::size_t mid = n / 2;
  const double threshold = R[mid] + std::log(100.0);
  Precedence out;
  if (R[n - 1] > threshold || R[n - 1] == kInf) {
    for (std::size_t i = mid; i < n; ++i) {
      if (R[i] > threshold) {
        out.witness = x[i];
        break;
      }
    }
    return out;
  }
  out.holds = true;
  double m = -kInf;
  for (std::size_t i = mid; i < n; ++i) m = std::max(m, R[i]);
  out.c = std::exp(m);
  return out;
}

Equivalence equivalent_samples(const std::vector<double>& x, const std::vector<double>& lf1,
                               const std::vector<double>& lf2) {
  Precedence a = precedes_samples(x, lf1, lf2);
  Precedence b = precedes_samples(x, lf2, lf1);
  Equivalence e;
  e.holds = a.holds && b.holds;
  if (e.holds) {
    e.c1 = 1.0 / a.c;
    e.c2 = b.c;
  } else {
    e.witness = a.holds ? b.witness : a.witness;
  }
  return e;
}

namespace {
void sample(const LogFn& f1, const LogFn& f2, const CompareGrid& g, std::vector<double>& x,
            std::vector<double>& l1, std::vector<double>& l2) {
  for (double t : log_points_desc(std::log(g.max), std::log(g.min), g.per_decade)) {
    x.push_back(std::exp(t));
    l1.push_back(f1(t));
    l2.push_back(f2(t));
  }
}
}  // namespace

Precedence precedes(const LogFn& f1, const LogFn& f2, const CompareGrid& grid) {
  std::vector<double> x, l1, l2;
  sample(f1, f2, grid, x, l1, l2);
  return precedes_samples(x, l1, l2);
}

Precedence precedes(const OrderFn& r1, const OrderFn& r2, const CompareGrid& grid) {
  return precedes(r1.as_log_fn(), r2.as_log_fn(), grid);
}

Equivalence equivalent_at_origin(const LogFn& f1, const LogFn& f2, const CompareGrid& grid) {
  std::vector<double> x, l1, l2;
  sample(f1, f2, grid, x, l1, l2);
  return equivalent_samples(x, l1, l2);
}

Equivalence equivalent_at_origin(const OrderFn& r1, const OrderFn& r2, const CompareGrid& grid) {
  return equivalent_at_origin(r1.as_log_fn(), r2.as_log_fn(), grid);
}

Equivalence equivalent_at_origin(const SourceFn& s1, const SourceFn& s2, const CompareGrid& grid) {
  return equivalent_at_origin(s1.as_log_fn(), s2.as_log_fn(), grid);
}

}  // namespace specreg
