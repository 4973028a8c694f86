#pragma once

#include <functional>
#include <string>
#include <vector>

#include "specreg/filters.hpp"
#include "specreg/grid.hpp"

namespace specreg {

enum class LimitKind { Liminf, Limsup };
enum class Trend { Steady, Growing, Decaying };

std::string to_string(LimitKind k);
std::string to_string(Trend t);

constexpr double kDivergenceCap = 1e12;
constexpr double kPositivityFloor = 1e-12;

struct GridMeta {
  double alpha_max = 0.0;
  double log_alpha_min = 0.0;  // deepest ln α sampled
  int per_decade = 0;
  int rounds = 0;
  std::size_t points = 0;
  bool depth_exhausted = false;
};

struct LimitEstimate {
  LimitKind kind = LimitKind::Liminf;
  double value = 0.0;  // may be +inf
  double tail_min = 0.0;
  double tail_max = 0.0;
  bool stabilized = false;
  Trend trend = Trend::Steady;
  double window_movement = 0.0;
  double extension_movement = 0.0;
  GridMeta grid_meta;

  // Operational finiteness/positivity; an unstabilized estimate that keeps
  // growing (decaying) counts as infinite (zero).
  bool finite() const;
  bool positive() const;
};

// ln of the sequence value at ln α, plus the magnitude of the log terms that
// were combined (used to detect cancellation).
struct TailSample {
  double log_value;
  double scale;
};
using TailFn = std::function<TailSample(double)>;

struct TailPlan {
  double log_alpha_max;
  double log_alpha_min;
  int per_decade;
  double log_alpha_floor;
  bool geometric_deep;
};

TailPlan make_tail_plan(const FilterFamily& filter, const AlphaGrid& grid);
// The base grid of the plan (ln α, descending).
std::vector<double> base_log_alpha_grid(const TailPlan& plan);
std::vector<double> base_log_alpha_grid(const FilterFamily& filter, const AlphaGrid& grid);

LimitEstimate estimate_tail_limit(LimitKind kind, const TailFn& f, const TailPlan& plan);

}  // namespace specreg
