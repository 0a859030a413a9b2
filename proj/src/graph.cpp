#include "neseek/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace neseek {
namespace {

// Forward/backward breadth-first reachability from node 0.
std::vector<bool> reachable(const Eigen::MatrixXd& w, int n, bool transpose) {
  std::vector<bool> seen(n, false);
  std::vector<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int u = queue.back();
    queue.pop_back();
    for (int v = 0; v < n; ++v) {
      // w(i, j) > 0: j -> i. Forward neighbors of u are rows i with w(i,u)>0.
      double a = transpose ? w(u, v) : w(v, u);
      if (a > 0.0 && !seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

// Solves T^T Y + Y T = C for quasi-upper-triangular T (real Schur form),
// one block column at a time. Block columns are 1 or 2 wide; each solve is a
// small dense system, which is plenty at n^2-by-n^2 scale.
Eigen::MatrixXd solve_schur_lyapunov(const Eigen::MatrixXd& t,
                                     const Eigen::MatrixXd& c) {
  const Eigen::Index m = t.rows();
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, m);
  Eigen::Index j0 = 0;
  while (j0 < m) {
    const Eigen::Index w =
        (j0 + 1 < m && t(j0 + 1, j0) != 0.0) ? 2 : 1;  // 2x2 bump = complex pair
    Eigen::MatrixXd rhs = c.block(0, j0, m, w);
    if (j0 > 0) rhs -= y.block(0, 0, m, j0) * t.block(0, j0, j0, w);
    if (w == 1) {
      Eigen::MatrixXd a = t.transpose() + t(j0, j0) * Eigen::MatrixXd::Identity(m, m);
      y.col(j0) = a.partialPivLu().solve(rhs);
    } else {
      // vec(T^T Ycol + Ycol Tjj) = (I2 (x) T^T + Tjj^T (x) Im) vec(Ycol)
      Eigen::MatrixXd tjj = t.block(j0, j0, 2, 2);
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * m);
      a.block(0, 0, m, m) = t.transpose() + tjj(0, 0) * Eigen::MatrixXd::Identity(m, m);
      a.block(m, m, m, m) = t.transpose() + tjj(1, 1) * Eigen::MatrixXd::Identity(m, m);
      a.block(0, m, m, m) = tjj(1, 0) * Eigen::MatrixXd::Identity(m, m);
      a.block(m, 0, m, m) = tjj(0, 1) * Eigen::MatrixXd::Identity(m, m);
      Eigen::VectorXd v(2 * m);
      v << rhs.col(0), rhs.col(1);
      Eigen::VectorXd sol = a.partialPivLu().solve(v);
      y.col(j0) = sol.head(m);
      y.col(j0 + 1) = sol.tail(m);
    }
    j0 += w;
  }
  return y;
}

}  // namespace

const char* err_name(Err code) {
  switch (code) {
    case Err::SelfLoop: return "SelfLoop";
    case Err::DuplicateEdge: return "DuplicateEdge";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::NonpositiveWeight: return "NonpositiveWeight";
    case Err::NotHurwitz: return "NotHurwitz";
    case Err::SingularSystem: return "SingularSystem";
    case Err::NoConvergence: return "NoConvergence";
    case Err::NotAffine: return "NotAffine";
    case Err::Unsorted: return "Unsorted";
    case Err::Overlapping: return "Overlapping";
    case Err::EmptyInterval: return "EmptyInterval";
    case Err::BadRatio: return "BadRatio";
    case Err::BadRange: return "BadRange";
    case Err::EmptySchedule: return "EmptySchedule";
    case Err::OutOfHorizon: return "OutOfHorizon";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::NonFiniteState: return "NonFiniteState";
    case Err::NonPositiveBeta: return "NonPositiveBeta";
    case Err::NonPositiveValues: return "NonPositiveValues";
    case Err::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

DirectedGraph build_graph(int n, const std::vector<Edge>& edges) {
  require(n >= 2, Err::IndexOutOfRange,
          "graph needs at least 2 nodes, got " + std::to_string(n));
  DirectedGraph g;
  g.n = n;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    require(e.from >= 0 && e.from < n && e.to >= 0 && e.to < n,
            Err::IndexOutOfRange,
            "edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                ") outside [0, " + std::to_string(n) + ")");
    require(e.from != e.to, Err::SelfLoop,
            "self loop at node " + std::to_string(e.from));
    require(e.weight > 0.0, Err::NonpositiveWeight,
            "edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                ") has weight " + std::to_string(e.weight));
    require(seen.insert({e.from, e.to}).second, Err::DuplicateEdge,
            "edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                ") listed twice");
    g.weights(e.to, e.from) = e.weight;
  }
  return g;
}

bool is_strongly_connected(const DirectedGraph& g) {
  std::vector<bool> fwd = reachable(g.weights, g.n, false);
  std::vector<bool> bwd = reachable(g.weights, g.n, true);
  for (int v = 0; v < g.n; ++v)
    if (!fwd[v] || !bwd[v]) return false;
  return true;
}

CouplingMatrices coupling_matrices(const DirectedGraph& g) {
  const int n = g.n;
  CouplingMatrices cm;
  cm.laplacian = -g.weights;
  cm.laplacian.diagonal() += g.weights.rowwise().sum();
  cm.injection = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cm.injection(i * n + j, i * n + j) = g.weights(i, j);
  cm.h = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      cm.h.block(i * n, k * n, n, n) =
          cm.laplacian(i, k) * Eigen::MatrixXd::Identity(n, n);
  cm.h += cm.injection;
  return cm;
}

LyapunovCertificate solve_lyapunov_certificate(const CouplingMatrices& cm,
                                               const Eigen::MatrixXd& q_choice) {
  const Eigen::Index m = cm.h.rows();
  require(q_choice.rows() == m && q_choice.cols() == m, Err::DimensionMismatch,
          "q_choice must be " + std::to_string(m) + "x" + std::to_string(m));
  require((q_choice - q_choice.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, q_choice.cwiseAbs().maxCoeff()),
          Err::BadConfig, "q_choice must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(q_choice);
  require(qe.eigenvalues().minCoeff() > 0.0, Err::BadConfig,
          "q_choice must be positive definite");

  Eigen::RealSchur<Eigen::MatrixXd> schur(cm.h);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& u = schur.matrixU();

  // Eigenvalue real parts off the quasi-triangular diagonal: 1x1 blocks are
  // real eigenvalues, 2x2 blocks contribute their trace/2 twice.
  double min_re = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < t.rows(); ) {
    if (j + 1 < t.rows() && t(j + 1, j) != 0.0) {
      min_re = std::min(min_re, (t(j, j) + t(j + 1, j + 1)) / 2.0);
      j += 2;
    } else {
      min_re = std::min(min_re, t(j, j));
      j += 1;
    }
  }
  require(min_re > 1e-12, Err::NotHurwitz,
          "estimate coupling has an eigenvalue with real part " +
              std::to_string(min_re) +
              "; the graph must be strongly connected with at least one edge");

  Eigen::MatrixXd c = u.transpose() * q_choice * u;
  Eigen::MatrixXd y = solve_schur_lyapunov(t, c);
  LyapunovCertificate cert;
  cert.p = u * y * u.transpose();
  cert.p = ((cert.p + cert.p.transpose()) / 2.0).eval();
  cert.q = q_choice;
  cert.residual =
      (cm.h.transpose() * cert.p + cert.p * cm.h - q_choice).norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(cert.p);
  require(pe.eigenvalues().minCoeff() > 0.0, Err::SingularSystem,
          "certificate solve produced a non positive definite matrix");
  return cert;
}

LyapunovCertificate solve_diagonal_certificate(const CouplingMatrices& cm) {
  const Eigen::Index m = cm.h.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(cm.h.transpose());
  Eigen::VectorXd theta = lu.solve(Eigen::VectorXd::Ones(m));
  require(theta.allFinite() && theta.minCoeff() > 0.0, Err::NotHurwitz,
          "no positive diagonal certificate; the graph must be strongly "
          "connected with at least one edge");
  LyapunovCertificate cert;
  cert.p = theta.asDiagonal();
  cert.q = cm.h.transpose() * cert.p + cert.p * cm.h;
  cert.q = ((cert.q + cert.q.transpose()) / 2.0).eval();
  cert.residual =
      (cm.h.transpose() * cert.p + cert.p * cm.h - cert.q).norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(cert.q);
  require(qe.eigenvalues().minCoeff() > 0.0, Err::NotHurwitz,
          "induced certificate right-hand side is not positive definite");
  return cert;
}

}  // namespace neseek
