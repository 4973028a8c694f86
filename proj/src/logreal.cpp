#include "specreg/logreal.hpp"

#include <algorithm>

#include "specreg/error.hpp"

namespace specreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check(double x, const char* what) {
  if (std::isnan(x)) throw DomainError(std::string("undefined result in ") + what);
}
}  // namespace

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  if (a == kInf) return kInf;
  return a + std::log1p(std::exp(b - a));
}

LogReal LogReal::from_double(double x) {
  check(x, "conversion");
  if (x == 0.0) return zero();
  return {x > 0 ? 1 : -1, std::log(std::fabs(x))};
}

LogReal operator-(const LogReal& a) { return {-a.sign, a.log_mag}; }

LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.sign == b.sign) return {a.sign, log_add_exp(a.log_mag, b.log_mag)};
  if (a.log_mag == b.log_mag) {
    if (a.log_mag == kInf) throw DomainError("inf - inf");
    return LogReal::zero();
  }
  const LogReal& big = a.log_mag > b.log_mag ? a : b;
  const LogReal& small = a.log_mag > b.log_mag ? b : a;
  if (big.log_mag == kInf) return big;
  double m = big.log_mag + std::log1p(-std::exp(small.log_mag - big.log_mag));
  return LogReal::from_log(m, big.sign);
}

LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

LogReal operator*(const LogReal& a, const LogReal& b) {
  if (a.is_zero() || b.is_zero()) {
    if (a.log_mag == kInf || b.log_mag == kInf) throw DomainError("0 * inf");
    return LogReal::zero();
  }
  return {a.sign * b.sign, a.log_mag + b.log_mag};
}

LogReal operator/(const LogReal& a, const LogReal& b) {
  if (b.is_zero()) {
    if (a.is_zero()) throw DomainError("0 / 0");
    return {a.sign, kInf};
  }
  if (a.is_zero()) return LogReal::zero();
  if (a.log_mag == kInf && b.log_mag == kInf) throw DomainError("inf / inf");
  return LogReal::from_log(a.log_mag - b.log_mag, a.sign * b.sign);
}

LogReal lr_pow(const LogReal& base, const LogReal& exponent) {
  double e = exponent.to_double();
  check(e, "pow");
  if (e == 0.0) return LogReal::from_double(1.0);
  if (base.is_zero()) {
    if (e > 0) return LogReal::zero();
    return {1, kInf};
  }
  int sign = 1;
  if (base.sign < 0) {
    if (std::floor(e) != e) throw DomainError("negative base with non-integer exponent");
    sign = std::fmod(e, 2.0) == 0.0 ? 1 : -1;
  }
  if (base.log_mag == 0.0) return {sign, 0.0};
  double m = e * base.log_mag;
  check(m, "pow");
  return LogReal::from_log(m, sign);
}

LogReal lr_exp(const LogReal& a) {
  double v = a.to_double();
  check(v, "exp");
  return LogReal::from_log(v, 1);
}

LogReal lr_ln(const LogReal& a) {
  if (a.sign < 0) throw DomainError("ln of negative argument");
  if (a.is_zero()) return {-1, kInf};
  return LogReal::from_double(a.log_mag);
}

LogReal lr_sqrt(const LogReal& a) {
  if (a.sign < 0) throw DomainError("sqrt of negative argument");
  if (a.is_zero()) return a;
  return {1, 0.5 * a.log_mag};
}

LogReal lr_abs(const LogReal& a) { return {a.sign == 0 ? 0 : 1, a.log_mag}; }

LogReal lr_sin(const LogReal& a) {
  double v = a.to_double();
  if (std::isinf(v)) throw DomainError("sin of infinite argument");
  return LogReal::from_double(std::sin(v));
}

}  // namespace specreg
