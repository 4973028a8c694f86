#pragma once

#include <cmath>
#include <limits>

namespace specreg {

// Real number stored as sign and natural log of the magnitude, so values like
// exp(-1e300) stay distinguishable from zero.
struct LogReal {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static LogReal zero() { return {}; }
  static LogReal from_double(double x);
  static LogReal from_log(double log_mag, int sign = 1) {
    if (log_mag == -std::numeric_limits<double>::infinity()) return zero();
    return {sign, log_mag};
  }

  bool is_zero() const { return sign == 0; }
  double to_double() const {
    return sign == 0 ? 0.0 : sign * std::exp(log_mag);
  }
};

LogReal operator-(const LogReal& a);
LogReal operator+(const LogReal& a, const LogReal& b);
LogReal operator-(const LogReal& a, const LogReal& b);
LogReal operator*(const LogReal& a, const LogReal& b);
LogReal operator/(const LogReal& a, const LogReal& b);

// These throw DomainError where the real function is undefined.
LogReal lr_pow(const LogReal& base, const LogReal& exponent);
LogReal lr_exp(const LogReal& a);
LogReal lr_ln(const LogReal& a);
LogReal lr_sqrt(const LogReal& a);
LogReal lr_abs(const LogReal& a);
LogReal lr_sin(const LogReal& a);

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace specreg
