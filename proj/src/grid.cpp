#include "specreg/grid.hpp"

#include <cmath>

#include "specreg/error.hpp"

namespace specreg {

std::vector<double> log_points_desc(double log_hi, double log_lo, int per_decade) {
  if (per_decade <= 0) throw ParameterOutOfRange("points per decade must be positive");
  if (!(log_hi >= log_lo)) throw ParameterOutOfRange("grid upper end below lower end");
  const double step = std::log(10.0) / per_decade;
  const auto n = static_cast<long>(std::ceil((log_hi - log_lo) / step - 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i < n; ++i) out.push_back(log_hi - static_cast<double>(i) * step);
  out.push_back(log_lo);
  if (n == 0 && log_hi != log_lo) out.insert(out.begin(), log_hi);
  return out;
}

std::vector<double> geometric_ascending(double lo, double hi, int per_decade) {
  if (!(lo > 0)) throw ParameterOutOfRange("geometric grid needs a positive lower end");
  auto t = log_points_desc(std::log(hi), std::log(lo), per_decade);
  std::vector<double> out;
  out.reserve(t.size());
  for (auto it = t.rbegin(); it != t.rend(); ++it) out.push_back(std::exp(*it));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_lambda_grid() { return geometric_ascending(1e-2, 10.0, 4); }

}  // namespace specreg
