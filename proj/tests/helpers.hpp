#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/rng.hpp"
#include "neseek/schedule.hpp"

namespace testutil {

// Central finite difference of a per-player payoff in the player's own
// action block. Independent route for checking analytic gradients.
inline Eigen::VectorXd fd_own_gradient(const neseek::GameModel& game, int i,
                                       const Eigen::VectorXd& v,
                                       double h = 1e-5) {
  const int off = game.offsets[i];
  const int d = game.dims[i];
  Eigen::VectorXd g(d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd lo = v, hi = v;
    hi(off + k) += h;
    lo(off + k) -= h;
    g(k) = (game.payoff(i, hi) - game.payoff(i, lo)) / (2.0 * h);
  }
  return g;
}

// Reachability closure by Floyd–Warshall; reference for strong connectivity.
inline bool warshall_strongly_connected(const neseek::DirectedGraph& g) {
  const int n = g.n;
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < n; ++j)
      if (g.weights(i, j) > 0.0) reach[j][i] = true;  // j receives from i
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

// Direct continuous-Lyapunov solve through the Kronecker-vectorized linear
// system (I (x) H^T + H^T (x) I) vec(P) = vec(Q). O(m^6), test sizes only.
inline Eigen::MatrixXd kronecker_lyapunov(const Eigen::MatrixXd& h,
                                          const Eigen::MatrixXd& q) {
  const Eigen::Index m = h.rows();
  Eigen::MatrixXd ht = h.transpose();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(m * m, m * m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      for (Eigen::Index c = 0; c < m; ++c) {
        big(a + b * m, a + c * m) += ht(b, c);  // I (x) H^T
        big(a + b * m, c + b * m) += ht(a, c);  // H^T (x) I
      }
  Eigen::VectorXd vq(m * m);
  for (Eigen::Index c = 0; c < m; ++c) vq.segment(c * m, m) = q.col(c);
  Eigen::VectorXd vp = big.fullPivLu().solve(vq);
  Eigen::MatrixXd p(m, m);
  for (Eigen::Index c = 0; c < m; ++c) p.col(c) = vp.segment(c * m, m);
  return p;
}

// Fine-grid scan of the from-zero deficit theta*t - M(t,0); lower bound on
// the exact supremum, tight to one grid cell's slope.
inline double grid_deficit(const neseek::Schedule& s, double theta,
                           double dt) {
  double worst = 0.0;
  for (double t = dt; t <= s.horizon + 1e-12; t += dt) {
    double tt = std::min(t, s.horizon);
    worst = std::max(worst, theta * tt - neseek::comm_width(s, 0.0, tt));
  }
  return worst;
}

inline neseek::DirectedGraph random_graph(std::mt19937_64& rng, int max_n) {
  int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 1));
  std::vector<neseek::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng() % 100 < 35)
        edges.push_back({i, j, 0.5 + neseek::uniform_real(rng, 0.0, 2.0)});
    }
  if (edges.empty()) edges.push_back({0, 1, 1.0});
  return neseek::build_graph(n, edges);
}

// Strongly connected by construction: a shuffled directed cycle backbone
// plus a sprinkling of extra edges.
inline neseek::DirectedGraph random_strong_graph(std::mt19937_64& rng,
                                                 int max_n) {
  int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 1));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng() % static_cast<unsigned>(i + 1)]);
  std::vector<neseek::Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    int from = order[i];
    int to = order[(i + 1) % n];
    edges.push_back({from, to, 0.5 + neseek::uniform_real(rng, 0.0, 2.0)});
    used[from][to] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || used[i][j]) continue;
      if (rng() % 100 < 30)
        edges.push_back({i, j, 0.5 + neseek::uniform_real(rng, 0.0, 2.0)});
    }
  return neseek::build_graph(n, edges);
}

// The five-node directed communication cycle used by the bundled fixtures.
inline neseek::DirectedGraph fixture_cycle(double w = 10.0) {
  return neseek::build_graph(
      5, {{0, 4, w}, {4, 3, w}, {3, 2, w}, {2, 1, w}, {1, 0, w}});
}

}  // namespace testutil
