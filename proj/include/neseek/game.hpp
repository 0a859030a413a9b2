#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "neseek/errors.hpp"

namespace neseek {

// A game in gradient form: each player i owns an action block of dims[i]
// coordinates inside a stacked vector of total_dim entries and evaluates the
// partial gradient of its own payoff with respect to that block at an
// arbitrary full vector (in the seeking dynamics that argument is the
// player's local estimate of everyone's action, not the true joint action).
//
// seek_sign[i] is +1 when player i ascends its payoff gradient and -1 when
// it descends (cost minimization); the sign multiplies the gain in the
// dynamics so the step size stays positive either way.
struct GameModel {
  int n = 0;                         // player count
  std::vector<int> dims;             // action dimension per player
  int total_dim = 0;                 // sum of dims
  std::vector<int> offsets;          // block starts; offsets[n] == total_dim
  Eigen::VectorXd seek_sign;         // per-player +1 (ascent) or -1 (descent)
  // (player index, full vector) -> own-block partial gradient, size dims[i].
  std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)> gradient;
  // (player index, full action profile) -> payoff value; may be empty for
  // custom games supplied in gradient form only.
  std::function<double(int, const Eigen::VectorXd&)> payoff;
};

// Own-block partial gradient of player i evaluated at v. i is 0-based;
// v must have total_dim finite entries.
Eigen::VectorXd partial_gradient(const GameModel& game, int i,
                                 const Eigen::VectorXd& v);

// Stacked partial gradients, every player evaluating at the same x (the
// joint-action pseudo-gradient).
Eigen::VectorXd pseudo_gradient(const GameModel& game,
                                const Eigen::VectorXd& x);

// Coefficients of an affine pseudo-gradient: pseudo_gradient(x) == m x + b.
struct AffineForm {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
};

// Extracts (m, b) by probing the origin and unit vectors, then verifies the
// affine model on total_dim + 1 fresh pseudo-random points to 1e-9 relative.
// Throws NotAffine when verification fails.
AffineForm affine_coefficients(const GameModel& game);

struct NashSolution {
  Eigen::VectorXd x_star;
  double residual = 0.0;  // norm of the pseudo-gradient at x_star
  int iterations = 0;
};

// Solves the stationarity condition pseudo_gradient(x) = 0. Affine games are
// solved by one linear solve of m x = -b (SingularSystem when m is not
// invertible); general games run damped Newton from x0 with a central
// finite-difference Jacobian, halving the step until the residual decreases
// (at most 30 halvings). NoConvergence when max_iter steps do not reach tol.
// An empty x0 means the origin.
NashSolution solve_nash(const GameModel& game,
                        const Eigen::VectorXd& x0 = Eigen::VectorXd(),
                        double tol = 1e-10, int max_iter = 100);

// alpha bounds every player's gradient Lipschitz constant over the full
// argument; beta is the strong-monotonicity modulus of the sign-oriented
// pseudo-gradient in the descent orientation, clamped at 0.
struct RegularityConstants {
  double alpha = 0.0;
  double beta = 0.0;
  bool exact = false;  // true when derived from exact affine coefficients
};

// Affine games: alpha = max over players of the spectral norm of that
// player's row block of m, beta = lambda_min of the symmetric part of the
// sign-oriented -m, both exact. Other games: sampled over [lo, hi]^total_dim
// with central finite-difference Jacobians at `samples` deterministic points.
RegularityConstants regularity_constants(const GameModel& game,
                                         double lo = -10.0, double hi = 10.0,
                                         int samples = 64);

// Five players with scalar actions trading against a price that rises with
// total consumption: player i maximizes
//   -(x_i - xq_i)^2 - x_i (r1 * sum_j x_j + r2).
GameModel energy_game(const Eigen::VectorXd& xq, double r1, double r2);

// Five players with planar actions minimizing
//   i ||x_i||^2 + (i, i) . x_i + i + sum of ||x_i - x_j||^2 coupling terms
// over the pairs (1,2), (2,3), (3,2), (4,2), (4,5), (5,1).
GameModel connectivity_game();

// Custom game with pseudo-gradient m x + b and the given per-player block
// dimensions; seek_sign defaults to all +1 when empty. No payoff callable.
GameModel affine_game(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                      const std::vector<int>& dims,
                      const Eigen::VectorXd& seek = Eigen::VectorXd());

}  // namespace neseek
