#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/schedule.hpp"

namespace neseek {

// Estimate-coupling matrices expanded to per-coordinate blocks so that games
// with multi-dimensional actions share the scalar update law coordinatewise.
// With D = total_dim the estimate stack is y = (y_1; ...; y_n), y_i in R^D,
// and during communication dy = -h y + b_diag .* (1_n (x) x).
struct LiftedCoupling {
  Eigen::MatrixXd h;        // (n D) x (n D) lifted coupling
  Eigen::VectorXd b_diag;   // diagonal of the lifted injection matrix
  int n = 0;                // player count
  int total_dim = 0;        // D
};

// Expands the scalar coupling of `g` to the action dimensions of `game`.
// Requires g.n == game.n.
LiftedCoupling lift_coupling(const DirectedGraph& g, const GameModel& game);

struct SimConfig {
  double epsilon = 0.1;    // gain scale, > 0
  Eigen::VectorXd kbar;    // per-player positive gains
  double dt = 1e-2;        // base step, > 0
  double t_end = 0.0;      // final time, > 0, at most the schedule horizon
  Eigen::VectorXd x0;      // initial actions, size total_dim
  Eigen::VectorXd y0;      // initial estimate stack, size n * total_dim
};

struct Derivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd dy;
};

// Right side of the seeking dynamics at one state: each action block moves
// along seek_sign[i] * epsilon * kbar[i] times the player's own-block partial
// gradient evaluated at its estimate vector y_i; estimates relax toward
// consensus and toward observed actions while communicating and are frozen
// (exact zero derivative) while silent.
Derivative derivative(const GameModel& game, const LiftedCoupling& coupling,
                      const SimConfig& cfg, bool communicating,
                      const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// One sample per accepted integration step. Every window boundary inside
// [0, t_end] appears exactly once in times; comm_flags[k] tells whether
// communication is active on [times[k], next boundary).
struct Trajectory {
  std::vector<double> times;
  std::vector<int> comm_flags;
  Eigen::MatrixXd x_samples;  // one row per sample, total_dim columns
  Eigen::MatrixXd y_samples;  // one row per sample, n * total_dim columns
  std::vector<std::string> warnings;
};

// Classic fourth-order fixed-step integration with substeps clamped to the
// schedule boundaries, so the communication flag is constant within every
// substep and no window is skipped. Silent spans advance the actions exactly
// (their derivative is constant there) and leave the estimates bitwise
// untouched. Deterministic: identical inputs give bit-identical samples.
// A graph that is not strongly connected produces a warning, not an error.
// Throws NonFiniteState with the offending time if the state leaves R^finite.
Trajectory simulate(const GameModel& game, const DirectedGraph& g,
                    const Schedule& sched, const SimConfig& cfg);

struct ErrorTraces {
  std::vector<double> e_norms;   // |x(t) - x_star| per sample
  std::vector<double> ex_norms;  // |y(t) - 1_n (x) x(t)| per sample
};

// Distance to the equilibrium action and distance of the estimate stack from
// exact consensus on the current action, per sample.
ErrorTraces error_traces(const Trajectory& traj, const Eigen::VectorXd& x_star);

}  // namespace neseek
