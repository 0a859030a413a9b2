#pragma once

#include <vector>

#include "neseek/errors.hpp"

namespace neseek {

// Communication window [open, close): agents exchange estimates while
// open <= t < close and are silent otherwise.
struct Window {
  double open = 0.0;
  double close = 0.0;
};

// Sorted, pairwise-disjoint half-open windows inside [0, horizon].
// close_m == open_{m+1} is allowed (back-to-back windows).
struct Schedule {
  std::vector<Window> windows;
  double horizon = 0.0;
  bool periodic = false;  // built by periodic_schedule
  double period = 0.0;    // valid when periodic
  double ratio = 0.0;     // valid when periodic
};

// Windows [m T, (m + theta) T) for m = 0, 1, ... while m T < horizon; the
// last window is clipped at the horizon. Requires T > 0, theta in (0, 1),
// horizon > 0.
Schedule periodic_schedule(double t_period, double theta, double horizon);

// Validates an explicit window list: nonempty, each close > open, sorted,
// non-overlapping, contained in [0, horizon].
Schedule from_intervals(const std::vector<Window>& windows, double horizon);

// Lebesgue measure of communication time within [a, b).
// Requires 0 <= a < b <= horizon.
double comm_width(const Schedule& s, double a, double b);

// FromZero checks the cumulative bound M(t, 0) >= theta * t - T0 over
// t in [0, horizon]; AllPairs checks M(t, s) >= theta (t - s) - T0 over all
// 0 <= s < t <= horizon. Both deficits are piecewise linear with extrema at
// window boundaries, so breakpoint evaluation is exact.
enum class AcrMode { FromZero, AllPairs };

struct AcrReport {
  double theta = 0.0;
  AcrMode mode = AcrMode::FromZero;
  double elastic_slack = 0.0;  // minimal T0 >= 0 making the bound hold
  bool holds_strict = false;   // bound holds with T0 = 0
  double worst_time = 0.0;     // first argmax of the deficit
  double worst_start = 0.0;    // AllPairs only; 0 in FromZero mode
};

AcrReport check_acr(const Schedule& s, double theta, AcrMode mode);

// inf window width and sup spacing of consecutive window openings, taken
// over the literal window list. sup_period is 0 when only one window exists.
struct QuasiStats {
  double inf_width = 0.0;
  double sup_period = 0.0;
  int window_count = 0;
};

QuasiStats quasi_periodic_stats(const Schedule& s);

// min / mean / max window width over the literal window list.
struct WidthStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  int count = 0;
};

WidthStats interval_stats(const Schedule& s);

// Half-open membership: true exactly when some window has open <= t < close.
// Requires 0 <= t < horizon.
bool is_communicating(const Schedule& s, double t);

// Smallest boundary (window open, window close, or horizon) strictly greater
// than t. Requires 0 <= t < horizon.
double next_switch(const Schedule& s, double t);

}  // namespace neseek
