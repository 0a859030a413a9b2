#include "neseek/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace neseek {
namespace {

// 1_n (x) x: the estimate stack every player would hold at exact consensus.
Eigen::VectorXd tile(const Eigen::VectorXd& x, int n) {
  Eigen::VectorXd out(n * x.size());
  for (int i = 0; i < n; ++i) out.segment(i * x.size(), x.size()) = x;
  return out;
}

// Gain-scaled stacked gradient, player i evaluating at its estimate y_i.
// Calls the gradient callable directly: non-finite intermediate stage values
// must flow through as inf/NaN so the step check can report NonFiniteState.
Eigen::VectorXd action_rate(const GameModel& game, const SimConfig& cfg,
                            const Eigen::VectorXd& y) {
  const int d = game.total_dim;
  Eigen::VectorXd dx(d);
  for (int i = 0; i < game.n; ++i) {
    double gain = game.seek_sign(i) * cfg.epsilon * cfg.kbar(i);
    dx.segment(game.offsets[i], game.dims[i]) =
        gain * game.gradient(i, y.segment(i * d, d));
  }
  return dx;
}

Eigen::VectorXd estimate_rate(const LiftedCoupling& lc,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
  return -lc.h * y + lc.b_diag.cwiseProduct(tile(x, lc.n));
}

}  // namespace

LiftedCoupling lift_coupling(const DirectedGraph& g, const GameModel& game) {
  require(g.n == game.n, Err::DimensionMismatch,
          "graph has " + std::to_string(g.n) + " nodes but the game has " +
              std::to_string(game.n) + " players");
  CouplingMatrices cm = coupling_matrices(g);
  const int n = game.n;
  const int d = game.total_dim;
  LiftedCoupling lc;
  lc.n = n;
  lc.total_dim = d;
  lc.b_diag.resize(n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      lc.b_diag.segment(i * d + game.offsets[j], game.dims[j])
          .setConstant(g.weights(i, j));
  lc.h = Eigen::MatrixXd::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (cm.laplacian(i, k) != 0.0)
        lc.h.block(i * d, k * d, d, d) =
            cm.laplacian(i, k) * Eigen::MatrixXd::Identity(d, d);
  lc.h.diagonal() += lc.b_diag;
  return lc;
}

Derivative derivative(const GameModel& game, const LiftedCoupling& coupling,
                      const SimConfig& cfg, bool communicating,
                      const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int d = game.total_dim;
  require(coupling.n == game.n && coupling.total_dim == d,
          Err::DimensionMismatch, "coupling was lifted for a different game");
  require(x.size() == d, Err::DimensionMismatch,
          "action vector has " + std::to_string(x.size()) +
              " entries, expected " + std::to_string(d));
  require(y.size() == static_cast<Eigen::Index>(game.n) * d,
          Err::DimensionMismatch,
          "estimate stack has " + std::to_string(y.size()) +
              " entries, expected " + std::to_string(game.n * d));
  require(cfg.kbar.size() == game.n, Err::DimensionMismatch,
          "kbar must list one gain per player");
  Derivative der;
  der.dx = action_rate(game, cfg, y);
  der.dy = communicating ? estimate_rate(coupling, x, y)
                         : Eigen::VectorXd::Zero(game.n * d);
  return der;
}

Trajectory simulate(const GameModel& game, const DirectedGraph& g,
                    const Schedule& sched, const SimConfig& cfg) {
  const int n = game.n;
  const int d = game.total_dim;
  require(std::isfinite(cfg.epsilon) && cfg.epsilon > 0.0, Err::BadConfig,
          "epsilon must be positive and finite");
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, Err::BadConfig,
          "dt must be positive and finite");
  require(std::isfinite(cfg.t_end) && cfg.t_end > 0.0, Err::BadConfig,
          "t_end must be positive and finite");
  require(cfg.t_end <= sched.horizon, Err::OutOfHorizon,
          "t_end " + std::to_string(cfg.t_end) +
              " exceeds the schedule horizon " +
              std::to_string(sched.horizon));
  require(cfg.kbar.size() == n, Err::DimensionMismatch,
          "kbar must list one gain per player");
  for (int i = 0; i < n; ++i)
    require(std::isfinite(cfg.kbar(i)) && cfg.kbar(i) > 0.0, Err::BadConfig,
            "gain of player " + std::to_string(i) + " must be positive");
  require(cfg.x0.size() == d, Err::DimensionMismatch,
          "x0 has " + std::to_string(cfg.x0.size()) + " entries, expected " +
              std::to_string(d));
  require(cfg.y0.size() == static_cast<Eigen::Index>(n) * d,
          Err::DimensionMismatch,
          "y0 has " + std::to_string(cfg.y0.size()) + " entries, expected " +
              std::to_string(n * d));
  require(cfg.x0.allFinite() && cfg.y0.allFinite(), Err::BadConfig,
          "initial state must be finite");
  WidthStats widths = interval_stats(sched);
  require(cfg.dt <= widths.min, Err::BadConfig,
          "dt " + std::to_string(cfg.dt) +
              " exceeds the smallest window width " +
              std::to_string(widths.min) + "; windows could be skipped");

  LiftedCoupling lc = lift_coupling(g, game);

  Trajectory traj;
  if (!is_strongly_connected(g))
    traj.warnings.push_back(
        "graph is not strongly connected; estimates may not reach consensus");

  std::vector<double> ts;
  std::vector<int> flags;
  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> ys;
  const std::size_t guess =
      static_cast<std::size_t>(cfg.t_end / cfg.dt) + sched.windows.size() * 2 +
      4;
  ts.reserve(guess);
  flags.reserve(guess);
  xs.reserve(guess);
  ys.reserve(guess);

  Eigen::VectorXd x = cfg.x0;
  Eigen::VectorXd y = cfg.y0;
  double t = 0.0;
  auto comm_at = [&](double tt) {
    return tt < sched.horizon && is_communicating(sched, tt);
  };
  auto push = [&](double tt) {
    ts.push_back(tt);
    flags.push_back(comm_at(tt) ? 1 : 0);
    xs.push_back(x);
    ys.push_back(y);
  };
  push(0.0);

  while (t < cfg.t_end) {
    bool comm = is_communicating(sched, t);
    double target = std::min(next_switch(sched, t), cfg.t_end);
    double t_next = t + cfg.dt;
    if (t_next >= target - 1e-9) t_next = target;  // snap to the boundary
    require(t_next > t, Err::BadConfig,
            "dt is below the floating-point resolution at t = " +
                std::to_string(t));
    double h = t_next - t;
    if (comm) {
      Eigen::VectorXd k1x = action_rate(game, cfg, y);
      Eigen::VectorXd k1y = estimate_rate(lc, x, y);
      Eigen::VectorXd k2x = action_rate(game, cfg, y + 0.5 * h * k1y);
      Eigen::VectorXd k2y =
          estimate_rate(lc, x + 0.5 * h * k1x, y + 0.5 * h * k1y);
      Eigen::VectorXd k3x = action_rate(game, cfg, y + 0.5 * h * k2y);
      Eigen::VectorXd k3y =
          estimate_rate(lc, x + 0.5 * h * k2x, y + 0.5 * h * k2y);
      Eigen::VectorXd k4x = action_rate(game, cfg, y + h * k3y);
      Eigen::VectorXd k4y = estimate_rate(lc, x + h * k3x, y + h * k3y);
      x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    } else {
      // estimates are frozen, so the action derivative is constant in time
      // and one explicit update is exact; y is deliberately untouched.
      x += h * action_rate(game, cfg, y);
    }
    t = t_next;
    require(x.allFinite() && y.allFinite(), Err::NonFiniteState,
            "state became non-finite at t = " + std::to_string(t));
    push(t);
  }

  const int m = static_cast<int>(ts.size());
  traj.times = std::move(ts);
  traj.comm_flags = std::move(flags);
  traj.x_samples.resize(m, d);
  traj.y_samples.resize(m, n * d);
  for (int k = 0; k < m; ++k) {
    traj.x_samples.row(k) = xs[k].transpose();
    traj.y_samples.row(k) = ys[k].transpose();
  }
  return traj;
}

ErrorTraces error_traces(const Trajectory& traj,
                         const Eigen::VectorXd& x_star) {
  const int m = static_cast<int>(traj.x_samples.rows());
  const int d = static_cast<int>(traj.x_samples.cols());
  require(x_star.size() == d, Err::DimensionMismatch,
          "equilibrium has " + std::to_string(x_star.size()) +
              " entries, expected " + std::to_string(d));
  require(traj.y_samples.rows() == m, Err::DimensionMismatch,
          "sample counts of actions and estimates differ");
  require(d > 0 && traj.y_samples.cols() % d == 0, Err::DimensionMismatch,
          "estimate stack width is not a multiple of the action width");
  const int n = static_cast<int>(traj.y_samples.cols()) / d;
  ErrorTraces et;
  et.e_norms.reserve(m);
  et.ex_norms.reserve(m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd xt = traj.x_samples.row(k).transpose();
    et.e_norms.push_back((xt - x_star).norm());
    double ex2 = 0.0;
    for (int i = 0; i < n; ++i)
      ex2 += (traj.y_samples.row(k).segment(i * d, d).transpose() - xt)
                 .squaredNorm();
    et.ex_norms.push_back(std::sqrt(ex2));
  }
  return et;
}

}  // namespace neseek
