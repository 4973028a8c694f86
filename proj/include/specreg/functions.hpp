#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specreg/expr.hpp"
#include "specreg/grid.hpp"

namespace specreg {

// ln f(x) as a function of ln x.
using LogFn = std::function<double(double)>;

struct CertificationInfo {
  bool positive = true;
  bool monotone = true;   // order functions only
  bool decays = true;     // ρ(α_min) small / s(λ_min) small
  bool continuous = true; // source functions only
  double depth = 0.0;     // smallest ln x examined
  std::string failure;    // first failed condition, empty when certified
};

class OrderFn {
 public:
  OrderFn(FuncExpr expr, std::optional<FuncExpr> log_expr, bool certified, CertificationInfo info);

  const FuncExpr& expr() const { return expr_; }
  const std::optional<FuncExpr>& log_expr() const { return log_expr_; }
  bool certified() const { return certified_; }
  const CertificationInfo& info() const { return info_; }
  std::string text() const { return expr_.to_string(); }

  double log_at(double log_alpha) const;  // ln ρ(e^{log_alpha})
  double operator()(double alpha) const { return expr_.eval(alpha); }
  LogFn as_log_fn() const;

 private:
  FuncExpr expr_;
  std::optional<FuncExpr> log_expr_;
  bool certified_;
  CertificationInfo info_;
};

class SourceFn {
 public:
  SourceFn(FuncExpr expr, bool certified, CertificationInfo info);

  const FuncExpr& expr() const { return expr_; }
  bool certified() const { return certified_; }
  const CertificationInfo& info() const { return info_; }
  std::string text() const { return expr_.to_string(); }

  double log_at(double log_lambda) const;
  double operator()(double lambda) const;
  LogFn as_log_fn() const;

 private:
  FuncExpr expr_;
  bool certified_;
  CertificationInfo info_;
};

struct CertGrid {
  double min;
  double max;
  int per_decade;
};

inline CertGrid default_order_cert_grid() { return {1e-7, 0.5, 16}; }
inline CertGrid default_source_cert_grid() { return {1e-8, 1e2, 16}; }

OrderFn certify_order_fn(const FuncExpr& expr, const CertGrid& grid = default_order_cert_grid());
SourceFn certify_source_fn(const FuncExpr& expr, const CertGrid& grid = default_source_cert_grid());
OrderFn make_order(const std::string& text, const CertGrid& grid = default_order_cert_grid());
SourceFn make_source(const std::string& text, const CertGrid& grid = default_source_cert_grid());

double eval_log(const OrderFn& order, double alpha);

struct CompareGrid {
  double min = 1e-20;
  double max = 0.5;
  int per_decade = 8;
};

struct Precedence {
  bool holds = false;
  double c = 0.0;        // max tail ratio when holds
  double witness = 0.0;  // x where the ratio crossed the divergence threshold
};

struct Equivalence {
  bool holds = false;
  double c1 = 0.0, c2 = 0.0;  // c1 f1 <= f2 <= c2 f1 on the tail
  std::optional<double> witness;
};

// Core comparison on samples ordered by decreasing x (ln values given).
Precedence precedes_samples(const std::vector<double>& x, const std::vector<double>& log_f1,
                            const std::vector<double>& log_f2);
Equivalence equivalent_samples(const std::vector<double>& x, const std::vector<double>& log_f1,
                               const std::vector<double>& log_f2);

Precedence precedes(const LogFn& f1, const LogFn& f2, const CompareGrid& grid = {});
Precedence precedes(const OrderFn& rho1, const OrderFn& rho2, const CompareGrid& grid = {});
Equivalence equivalent_at_origin(const LogFn& f1, const LogFn& f2, const CompareGrid& grid = {});
Equivalence equivalent_at_origin(const OrderFn& rho1, const OrderFn& rho2, const CompareGrid& grid = {});
Equivalence equivalent_at_origin(const SourceFn& s1, const SourceFn& s2, const CompareGrid& grid = {});

}  // namespace specreg
