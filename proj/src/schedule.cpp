#include "neseek/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace neseek {
namespace {

// Breakpoints of the piecewise-linear deficit: 0, every window boundary,
// and the horizon, deduplicated and sorted.
std::vector<double> breakpoints(const Schedule& s) {
  std::vector<double> pts{0.0, s.horizon};
  for (const Window& w : s.windows) {
    pts.push_back(w.open);
    pts.push_back(w.close);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double clip_width(const Window& w, double a, double b) {
  return std::max(0.0, std::min(b, w.close) - std::max(a, w.open));
}

}  // namespace

Schedule periodic_schedule(double t_period, double theta, double horizon) {
  require(t_period > 0.0, Err::BadRange,
          "period must be positive, got " + std::to_string(t_period));
  require(theta > 0.0 && theta < 1.0, Err::BadRatio,
          "duty ratio must lie in (0, 1), got " + std::to_string(theta));
  require(horizon > 0.0, Err::BadRange,
          "horizon must be positive, got " + std::to_string(horizon));
  Schedule s;
  s.horizon = horizon;
  s.periodic = true;
  s.period = t_period;
  s.ratio = theta;
  for (int m = 0;; ++m) {
    double open = m * t_period;
    if (open >= horizon) break;
    double close = std::min(open + theta * t_period, horizon);
    if (close > open) s.windows.push_back({open, close});
  }
  require(!s.windows.empty(), Err::EmptySchedule,
          "horizon admits no communication window");
  return s;
}

Schedule from_intervals(const std::vector<Window>& windows, double horizon) {
  require(horizon > 0.0, Err::BadRange,
          "horizon must be positive, got " + std::to_string(horizon));
  require(!windows.empty(), Err::EmptySchedule, "window list is empty");
  for (std::size_t m = 0; m < windows.size(); ++m) {
    const Window& w = windows[m];
    require(std::isfinite(w.open) && std::isfinite(w.close), Err::BadRange,
            "window " + std::to_string(m) + " has a non-finite endpoint");
    require(w.close > w.open, Err::EmptyInterval,
            "window " + std::to_string(m) + " [" + std::to_string(w.open) +
                ", " + std::to_string(w.close) + ") has nonpositive width");
    require(w.open >= 0.0 && w.close <= horizon, Err::OutOfHorizon,
            "window " + std::to_string(m) + " leaves [0, " +
                std::to_string(horizon) + "]");
    if (m > 0) {
      require(windows[m].open >= windows[m - 1].open, Err::Unsorted,
              "windows must be sorted by opening time (index " +
                  std::to_string(m) + ")");
      require(windows[m].open >= windows[m - 1].close, Err::Overlapping,
              "windows " + std::to_string(m - 1) + " and " +
                  std::to_string(m) + " overlap");
    }
  }
  Schedule s;
  s.windows = windows;
  s.horizon = horizon;
  return s;
}

double comm_width(const Schedule& s, double a, double b) {
  require(a >= 0.0 && a < b && b <= s.horizon, Err::BadRange,
          "need 0 <= a < b <= horizon, got a=" + std::to_string(a) +
              " b=" + std::to_string(b));
  double total = 0.0;
  for (const Window& w : s.windows) total += clip_width(w, a, b);
  return total;
}

AcrReport check_acr(const Schedule& s, double theta, AcrMode mode) {
  require(theta > 0.0 && theta < 1.0, Err::BadRatio,
          "rate must lie in (0, 1), got " + std::to_string(theta));
  std::vector<double> pts = breakpoints(s);
  // Prefix communication measure at each breakpoint.
  std::vector<double> measure(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    double seg = 0.0;
    for (const Window& w : s.windows) seg += clip_width(w, pts[k - 1], pts[k]);
    measure[k] = measure[k - 1] + seg;
  }

  AcrReport rep;
  rep.theta = theta;
  rep.mode = mode;
  double worst = -std::numeric_limits<double>::infinity();
  if (mode == AcrMode::FromZero) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      double deficit = theta * pts[k] - measure[k];
      if (deficit > worst) {
        worst = deficit;
        rep.worst_time = pts[k];
      }
    }
    rep.worst_start = 0.0;
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = i + 1; k < pts.size(); ++k) {
        double deficit =
            theta * (pts[k] - pts[i]) - (measure[k] - measure[i]);
        if (deficit > worst) {
          worst = deficit;
          rep.worst_start = pts[i];
          rep.worst_time = pts[k];
        }
      }
    }
  }
  rep.elastic_slack = std::max(0.0, worst);
  rep.holds_strict = worst <= 0.0;
  return rep;
}

QuasiStats quasi_periodic_stats(const Schedule& s) {
  QuasiStats q;
  q.window_count = static_cast<int>(s.windows.size());
  q.inf_width = std::numeric_limits<double>::infinity();
  for (const Window& w : s.windows)
    q.inf_width = std::min(q.inf_width, w.close - w.open);
  q.sup_period = 0.0;
  for (std::size_t m = 1; m < s.windows.size(); ++m)
    q.sup_period =
        std::max(q.sup_period, s.windows[m].open - s.windows[m - 1].open);
  return q;
}

WidthStats interval_stats(const Schedule& s) {
  WidthStats w;
  w.count = static_cast<int>(s.windows.size());
  w.min = std::numeric_limits<double>::infinity();
  w.max = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const Window& win : s.windows) {
    double width = win.close - win.open;
    w.min = std::min(w.min, width);
    w.max = std::max(w.max, width);
    total += width;
  }
  w.mean = total / w.count;
  return w;
}

bool is_communicating(const Schedule& s, double t) {
  require(t >= 0.0 && t < s.horizon, Err::OutOfHorizon,
          "time " + std::to_string(t) + " outside [0, " +
              std::to_string(s.horizon) + ")");
  // Last window opening at or before t.
  auto it = std::upper_bound(
      s.windows.begin(), s.windows.end(), t,
      [](double v, const Window& w) { return v < w.open; });
  if (it == s.windows.begin()) return false;
  --it;
  return t < it->close;
}

double next_switch(const Schedule& s, double t) {
  require(t >= 0.0 && t < s.horizon, Err::OutOfHorizon,
          "time " + std::to_string(t) + " outside [0, " +
              std::to_string(s.horizon) + ")");
  double best = s.horizon;
  for (const Window& w : s.windows) {
    if (w.open > t) {
      best = std::min(best, w.open);
      break;  // windows are sorted; later ones only open later
    }
    if (w.close > t) best = std::min(best, w.close);
  }
  return best;
}

}  // namespace neseek
