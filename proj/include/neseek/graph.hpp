#pragma once

#include <Eigen/Dense>
#include <vector>

#include "neseek/errors.hpp"

namespace neseek {

// Directed communication edge, 0-based node indices. `from` transmits its
// action to `to`.
struct Edge {
  int from = 0;
  int to = 0;
  double weight = 1.0;
};

// Weighted digraph on n >= 2 nodes. weights(i, j) = a_ij > 0 exactly when
// node j transmits to node i; the diagonal is zero (no self loops).
struct DirectedGraph {
  int n = 0;
  Eigen::MatrixXd weights;
};

// Operators of the estimate-consensus dynamics, all built from the graph:
//   laplacian  L = D - A with D = diag(in-degrees), in-degree_i = sum_j a_ij
//   injection  B = n^2 x n^2 diagonal, entries (a_11,..,a_1n, a_21,..,a_nn)
//   h          = kron(L, I_n) + B
// Row (i, j) of -h y + B (1_n (x) x) equals the componentwise estimate law
//   -( sum_k a_ik (y_ij - y_kj) + a_ij (y_ij - x_j) ).
struct CouplingMatrices {
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd injection;
  Eigen::MatrixXd h;
};

// Symmetric positive definite P with h^T P + P h = q, plus the achieved
// Frobenius residual. In the diagonal variant q is induced, not chosen.
struct LyapunovCertificate {
  Eigen::MatrixXd p;
  Eigen::MatrixXd q;
  double residual = 0.0;
};

// Validates and assembles the weight matrix. Rejects self loops, duplicate
// edges, out-of-range endpoints, and nonpositive weights.
DirectedGraph build_graph(int n, const std::vector<Edge>& edges);

// True when every node reaches every other along directed edges.
bool is_strongly_connected(const DirectedGraph& g);

CouplingMatrices coupling_matrices(const DirectedGraph& g);

// Solves h^T P + P h = q_choice for the unique symmetric positive definite P.
// Requires q_choice symmetric positive definite and -h Hurwitz (every
// eigenvalue of h in the open right half-plane); throws NotHurwitz otherwise.
// Uses the Schur-decomposition (Bartels-Stewart) route.
LyapunovCertificate solve_lyapunov_certificate(const CouplingMatrices& cm,
                                               const Eigen::MatrixXd& q_choice);

// Diagonal variant: P = diag(theta) with h^T theta = 1, which for the
// M-matrix structure of h yields theta > 0 and an induced q = h^T P + P h
// that is symmetric strictly diagonally dominant, hence positive definite.
LyapunovCertificate solve_diagonal_certificate(const CouplingMatrices& cm);

}  // namespace neseek
