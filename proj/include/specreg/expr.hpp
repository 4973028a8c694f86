#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "specreg/logreal.hpp"

namespace specreg {

enum class UnaryOp { Neg, Exp, Ln, Sqrt, Abs, Sin };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  struct Constant { double value; };
  struct Variable { std::string name; };
  struct Unary { UnaryOp op; NodePtr child; };
  struct Binary { BinaryOp op; NodePtr left, right; };
  std::variant<Constant, Variable, Unary, Binary> v;
};

using Binding = std::map<std::string, double, std::less<>>;

class FuncExpr {
 public:
  explicit FuncExpr(NodePtr root);

  static FuncExpr parse(std::string_view text);
  static FuncExpr constant(double c);
  static FuncExpr variable(const std::string& name);

  const NodePtr& root() const { return root_; }
  // "alpha", "lambda", or empty when constant.
  const std::optional<std::string>& variable_name() const { return var_; }
  std::string to_string() const;

  double eval(const Binding& binding) const;
  double eval(double x) const;  // binds the expression's own variable
  // Evaluates with the variable given as ln x; never underflows to zero spuriously.
  LogReal eval_log_domain(double log_x) const;

 private:
  NodePtr root_;
  std::optional<std::string> var_;
};

inline FuncExpr parse_expr(std::string_view text) { return FuncExpr::parse(text); }
double eval_expr(const FuncExpr& e, const Binding& binding);

}  // namespace specreg
