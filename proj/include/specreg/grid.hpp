#pragma once

#include <vector>

namespace specreg {

// Geometric grid in α. A zero max or per_decade means "filter default"
// (α₀/2, and 64 or 512 points per decade).
struct AlphaGrid {
  double min = 1e-7;
  double max = 0.0;
  int per_decade = 0;
};

// ln-values from log_hi down to log_lo (both included), uniform step ln10/per_decade.
std::vector<double> log_points_desc(double log_hi, double log_lo, int per_decade);

// Geometric values lo..hi ascending, both ends included.
std::vector<double> geometric_ascending(double lo, double hi, int per_decade);

std::vector<double> default_lambda_grid();  // {0.01, 0.1, 1, 10} refined: 1e-2..1e1, 4/decade

}  // namespace specreg
