#include "specreg/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "specreg/error.hpp"

namespace specreg {

namespace {

NodePtr mk(Node::Constant c) { return std::make_shared<Node>(Node{c}); }
NodePtr mk_var(std::string n) { return std::make_shared<Node>(Node{Node::Variable{std::move(n)}}); }
NodePtr mk_un(UnaryOp op, NodePtr c) { return std::make_shared<Node>(Node{Node::Unary{op, std::move(c)}}); }
NodePtr mk_bin(BinaryOp op, NodePtr l, NodePtr r) {
  return std::make_shared<Node>(Node{Node::Binary{op, std::move(l), std::move(r)}});
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) throw SyntaxError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (eat('+')) l = mk_bin(BinaryOp::Add, l, term());
      else if (eat('-')) l = mk_bin(BinaryOp::Sub, l, term());
      else return l;
    }
  }
  NodePtr term() {
    NodePtr l = factor();
    for (;;) {
      if (eat('*')) l = mk_bin(BinaryOp::Mul, l, factor());
      else if (eat('/')) l = mk_bin(BinaryOp::Div, l, factor());
      else return l;
    }
  }
  NodePtr factor() {
    NodePtr b = base();
    if (eat('^')) return mk_bin(BinaryOp::Pow, b, factor());
    return b;
  }
  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return mk_un(UnaryOp::Neg, base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }
  NodePtr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw SyntaxError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    std::string tok(s_.substr(start, pos_ - start));
    return mk(Node::Constant{std::strtod(tok.c_str(), nullptr)});
  }
  NodePtr ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    if (name == "alpha" || name == "lambda") return mk_var(name);
    static const std::map<std::string, UnaryOp> fns = {{"exp", UnaryOp::Exp}, {"ln", UnaryOp::Ln},
                                                       {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
                                                       {"sin", UnaryOp::Sin}};
    auto it = fns.find(name);
    if (it == fns.end()) throw UnknownIdentifier("unknown identifier '" + name + "' at offset " + std::to_string(start));
    if (!eat('(')) throw SyntaxError("expected '(' after " + name, pos_);
    NodePtr arg = expr();
    if (!eat(')')) throw SyntaxError("expected ')'", pos_);
    return mk_un(it->second, arg);
  }
};

void collect_vars(const Node& n, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Variable>) out.insert(x.name);
        else if constexpr (std::is_same_v<T, Node::Unary>) collect_vars(*x.child, out);
        else if constexpr (std::is_same_v<T, Node::Binary>) {
          collect_vars(*x.left, out);
          collect_vars(*x.right, out);
        }
      },
      n.v);
}

int prec(const Node& n) {
  if (auto* b = std::get_if<Node::Binary>(&n.v)) {
    switch (b->op) {
      case BinaryOp::Add:
      case BinaryOp::Sub: return 1;
      case BinaryOp::Mul:
      case BinaryOp::Div: return 2;
      case BinaryOp::Pow: return 3;
    }
  }
  if (auto* u = std::get_if<Node::Unary>(&n.v); u && u->op == UnaryOp::Neg) return 4;
  if (auto* c = std::get_if<Node::Constant>(&n.v); c && std::signbit(c->value)) return 4;
  return 5;
}

std::string print(const Node& n);

std::string wrap(const Node& n, bool parens) { return parens ? "(" + print(n) + ")" : print(n); }

std::string print(const Node& n) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", std::fabs(x.value));
          std::string s = buf;
          if (std::isinf(x.value)) throw DomainError("cannot print an infinite constant");
          return std::signbit(x.value) ? "-" + s : s;
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, Node::Unary>) {
          switch (x.op) {
            case UnaryOp::Neg: return "-" + wrap(*x.child, prec(*x.child) < 4);
            case UnaryOp::Exp: return "exp(" + print(*x.child) + ")";
            case UnaryOp::Ln: return "ln(" + print(*x.child) + ")";
            case UnaryOp::Sqrt: return "sqrt(" + print(*x.child) + ")";
            case UnaryOp::Abs: return "abs(" + print(*x.child) + ")";
            case UnaryOp::Sin: return "sin(" + print(*x.child) + ")";
          }
          return {};
        } else {
          int lp = prec(*x.left), rp = prec(*x.right);
          switch (x.op) {
            case BinaryOp::Add: return wrap(*x.left, lp < 1) + "+" + wrap(*x.right, rp <= 1);
            case BinaryOp::Sub: return wrap(*x.left, lp < 1) + "-" + wrap(*x.right, rp <= 1);
            case BinaryOp::Mul: return wrap(*x.left, lp < 2) + "*" + wrap(*x.right, rp <= 2);
            case BinaryOp::Div: return wrap(*x.left, lp < 2) + "/" + wrap(*x.right, rp <= 2);
            case BinaryOp::Pow: return wrap(*x.left, lp <= 3) + "^" + wrap(*x.right, rp < 3);
          }
          return {};
        }
      },
      n.v);
}

double eval_d(const Node& n, const Binding& b) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          auto it = b.find(x.name);
          if (it == b.end()) throw UnboundVariable("variable '" + x.name + "' is not bound");
          return it->second;
        } else if constexpr (std::is_same_v<T, Node::Unary>) {
          double c = eval_d(*x.child, b);
          switch (x.op) {
            case UnaryOp::Neg: return -c;
            case UnaryOp::Exp: return std::exp(c);
            case UnaryOp::Ln:
              if (!(c > 0)) throw DomainError("ln of nonpositive argument");
              return std::log(c);
            case UnaryOp::Sqrt:
              if (c < 0) throw DomainError("sqrt of negative argument");
              return std::sqrt(c);
            case UnaryOp::Abs: return std::fabs(c);
            case UnaryOp::Sin:
              if (std::isinf(c)) throw DomainError("sin of infinite argument");
              return std::sin(c);
          }
          return 0;
        } else {
          double l = eval_d(*x.left, b), r = eval_d(*x.right, b);
          double v = 0;
          switch (x.op) {
            case BinaryOp::Add: v = l + r; break;
            case BinaryOp::Sub: v = l - r; break;
            case BinaryOp::Mul: v = l * r; break;
            case BinaryOp::Div: v = l / r; break;
            case BinaryOp::Pow: v = std::pow(l, r); break;
          }
          if (std::isnan(v)) throw DomainError("undefined arithmetic result");
          return v;
        }
      },
      n.v);
}

LogReal eval_l(const Node& n, const LogReal& var) {
  return std::visit(
      [&](const auto& x) -> LogReal {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return LogReal::from_double(x.value);
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          return var;
        } else if constexpr (std::is_same_v<T, Node::Unary>) {
          LogReal c = eval_l(*x.child, var);
          switch (x.op) {
            case UnaryOp::Neg: return -c;
            case UnaryOp::Exp: return lr_exp(c);
            case UnaryOp::Ln: return lr_ln(c);
            case UnaryOp::Sqrt: return lr_sqrt(c);
            case UnaryOp::Abs: return lr_abs(c);
            case UnaryOp::Sin: return lr_sin(c);
          }
          return {};
        } else {
          LogReal l = eval_l(*x.left, var), r = eval_l(*x.right, var);
          switch (x.op) {
            case BinaryOp::Add: return l + r;
            case BinaryOp::Sub: return l - r;
            case BinaryOp::Mul: return l * r;
            case BinaryOp::Div: return l / r;
            case BinaryOp::Pow: return lr_pow(l, r);
          }
          return {};
        }
      },
      n.v);
}

}  // namespace

FuncExpr::FuncExpr(NodePtr root) : root_(std::move(root)) {
  std::set<std::string> vars;
  collect_vars(*root_, vars);
  if (vars.size() > 1) throw SyntaxError("expression mixes variables alpha and lambda", 0);
  if (!vars.empty()) var_ = *vars.begin();
}

FuncExpr FuncExpr::parse(std::string_view text) { return FuncExpr(Parser(text).parse()); }
FuncExpr FuncExpr::constant(double c) { return FuncExpr(mk(Node::Constant{c})); }
FuncExpr FuncExpr::variable(const std::string& name) { return FuncExpr(mk_var(name)); }

std::string FuncExpr::to_string() const { return print(*root_); }

double FuncExpr::eval(const Binding& b) const { return eval_d(*root_, b); }

double FuncExpr::eval(double x) const {
  Binding b;
  if (var_) b[*var_] = x;
  return eval_d(*root_, b);
}

LogReal FuncExpr::eval_log_domain(double log_x) const {
  return eval_l(*root_, LogReal::from_log(log_x, 1));
}

double eval_expr(const FuncExpr& e, const Binding& binding) { return e.eval(binding); }

}  // namespace specreg
