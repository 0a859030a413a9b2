#include "neseek/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neseek/rng.hpp"

namespace neseek {
namespace {

std::vector<int> block_offsets(const std::vector<int>& dims) {
  std::vector<int> offsets(dims.size() + 1, 0);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    require(dims[i] >= 1, Err::BadConfig,
            "action dimension of player " + std::to_string(i) +
                " must be positive");
    offsets[i + 1] = offsets[i] + dims[i];
  }
  return offsets;
}

Eigen::MatrixXd fd_jacobian(const GameModel& game, const Eigen::VectorXd& x) {
  const int d = game.total_dim;
  Eigen::MatrixXd jac(d, d);
  for (int k = 0; k < d; ++k) {
    double h = 1e-6 * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(k) += h;
    xm(k) -= h;
    jac.col(k) = (pseudo_gradient(game, xp) - pseudo_gradient(game, xm)) /
                 (2.0 * h);
  }
  return jac;
}

// Scales row block i by seek_sign[i]; the result is the Jacobian of the
// sign-oriented pseudo-gradient.
Eigen::MatrixXd orient_rows(const GameModel& game, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (int i = 0; i < game.n; ++i)
    out.middleRows(game.offsets[i], game.dims[i]) *= game.seek_sign(i);
  return out;
}

double max_row_block_norm(const GameModel& game, const Eigen::MatrixXd& m) {
  double alpha = 0.0;
  for (int i = 0; i < game.n; ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        m.middleRows(game.offsets[i], game.dims[i]));
    alpha = std::max(alpha, svd.singularValues()(0));
  }
  return alpha;
}

// lambda_min of the symmetric part of the negated oriented Jacobian: the
// strong-monotonicity modulus of the descent-oriented pseudo-gradient.
double monotonicity_modulus(const GameModel& game, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd descent = -orient_rows(game, m);
  Eigen::MatrixXd sym = 0.5 * (descent + descent.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return es.eigenvalues().minCoeff();
}

const std::vector<std::vector<int>>& connectivity_neighbors() {
  static const std::vector<std::vector<int>> nbrs = {
      {1}, {2}, {1}, {1, 4}, {0}};
  return nbrs;
}

}  // namespace

Eigen::VectorXd partial_gradient(const GameModel& game, int i,
                                 const Eigen::VectorXd& v) {
  require(i >= 0 && i < game.n, Err::IndexOutOfRange,
          "player index " + std::to_string(i) + " outside [0, " +
              std::to_string(game.n) + ")");
  require(v.size() == game.total_dim, Err::DimensionMismatch,
          "argument has " + std::to_string(v.size()) + " entries, expected " +
              std::to_string(game.total_dim));
  require(v.allFinite(), Err::BadConfig,
          "gradient argument has non-finite entries");
  Eigen::VectorXd g = game.gradient(i, v);
  require(g.size() == game.dims[i], Err::DimensionMismatch,
          "gradient of player " + std::to_string(i) + " returned " +
              std::to_string(g.size()) + " entries, expected " +
              std::to_string(game.dims[i]));
  return g;
}

Eigen::VectorXd pseudo_gradient(const GameModel& game,
                                const Eigen::VectorXd& x) {
  Eigen::VectorXd out(game.total_dim);
  for (int i = 0; i < game.n; ++i)
    out.segment(game.offsets[i], game.dims[i]) = partial_gradient(game, i, x);
  return out;
}

AffineForm affine_coefficients(const GameModel& game) {
  const int d = game.total_dim;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  AffineForm form;
  form.b = pseudo_gradient(game, zero);
  form.m.resize(d, d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd e = zero;
    e(k) = 1.0;
    form.m.col(k) = pseudo_gradient(game, e) - form.b;
  }
  std::mt19937_64 rng(0x6e657365656b5f67ULL);  // fixed probe stream
  for (int p = 0; p < d + 1; ++p) {
    Eigen::VectorXd probe(d);
    for (int k = 0; k < d; ++k) probe(k) = uniform_real(rng, -3.0, 3.0);
    Eigen::VectorXd g = pseudo_gradient(game, probe);
    double err = (g - (form.m * probe + form.b)).cwiseAbs().maxCoeff();
    require(err <= 1e-9 * (1.0 + g.cwiseAbs().maxCoeff()), Err::NotAffine,
            "pseudo-gradient deviates from an affine model by " +
                std::to_string(err) + " at a probe point");
  }
  return form;
}

NashSolution solve_nash(const GameModel& game, const Eigen::VectorXd& x0,
                        double tol, int max_iter) {
  require(tol > 0.0, Err::BadConfig, "tolerance must be positive");
  require(max_iter >= 1, Err::BadConfig, "iteration budget must be positive");
  const int d = game.total_dim;
  Eigen::VectorXd x = x0.size() == 0 ? Eigen::VectorXd::Zero(d) : x0;
  require(x.size() == d, Err::DimensionMismatch,
          "initial guess has " + std::to_string(x.size()) +
              " entries, expected " + std::to_string(d));
  require(x.allFinite(), Err::BadConfig,
          "initial guess has non-finite entries");

  bool affine = true;
  AffineForm form;
  try {
    form = affine_coefficients(game);
  } catch (const Error& e) {
    if (e.code() != Err::NotAffine) throw;
    affine = false;
  }

  NashSolution sol;
  if (affine) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(form.m);
    require(lu.isInvertible(), Err::SingularSystem,
            "stationarity system is singular");
    sol.x_star = lu.solve(-form.b);
    sol.residual = pseudo_gradient(game, sol.x_star).norm();
    sol.iterations = 1;
    if (sol.residual <= tol) return sol;
    x = sol.x_star;  // ill-conditioned solve: polish with Newton below
  }

  Eigen::VectorXd g = pseudo_gradient(game, x);
  double gnorm = g.norm();
  int iter = 0;
  while (gnorm > tol) {
    require(iter < max_iter, Err::NoConvergence,
            "stationarity residual " + std::to_string(gnorm) + " after " +
                std::to_string(iter) + " Newton steps");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(fd_jacobian(game, x));
    require(lu.isInvertible(), Err::SingularSystem,
            "Jacobian of the pseudo-gradient is singular at the iterate");
    Eigen::VectorXd step = lu.solve(-g);
    double lambda = 1.0;
    bool improved = false;
    Eigen::VectorXd x_next;
    Eigen::VectorXd g_next;
    double gnorm_next = 0.0;
    for (int h = 0; h <= 30; ++h) {
      x_next = x + lambda * step;
      if (x_next.allFinite()) {
        g_next = pseudo_gradient(game, x_next);
        gnorm_next = g_next.norm();
        if (std::isfinite(gnorm_next) && gnorm_next < gnorm) {
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    require(improved, Err::NoConvergence,
            "step damping failed to reduce the stationarity residual below " +
                std::to_string(gnorm));
    x = x_next;
    g = g_next;
    gnorm = gnorm_next;
    ++iter;
  }
  sol.x_star = x;
  sol.residual = gnorm;
  sol.iterations = iter + (affine ? 1 : 0);
  return sol;
}

RegularityConstants regularity_constants(const GameModel& game, double lo,
                                         double hi, int samples) {
  require(lo < hi, Err::BadRange, "sampling box is empty");
  require(samples >= 1, Err::BadConfig, "sample count must be positive");
  RegularityConstants rc;
  try {
    AffineForm form = affine_coefficients(game);
    rc.alpha = max_row_block_norm(game, form.m);
    rc.beta = std::max(0.0, monotonicity_modulus(game, form.m));
    rc.exact = true;
    return rc;
  } catch (const Error& e) {
    if (e.code() != Err::NotAffine) throw;
  }
  std::mt19937_64 rng(0x6e657365656b5f72ULL);  // fixed sampling stream
  double alpha = 0.0;
  double modulus = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(game.total_dim);
    for (int k = 0; k < game.total_dim; ++k)
      x(k) = uniform_real(rng, lo, hi);
    Eigen::MatrixXd jac = fd_jacobian(game, x);
    alpha = std::max(alpha, max_row_block_norm(game, jac));
    modulus = std::min(modulus, monotonicity_modulus(game, jac));
  }
  rc.alpha = alpha;
  rc.beta = std::max(0.0, modulus);
  rc.exact = false;
  return rc;
}

GameModel energy_game(const Eigen::VectorXd& xq, double r1, double r2) {
  require(xq.size() >= 1, Err::BadConfig, "xq must be nonempty");
  require(xq.allFinite() && std::isfinite(r1) && std::isfinite(r2),
          Err::BadConfig, "game parameters must be finite");
  const int n = static_cast<int>(xq.size());
  GameModel g;
  g.n = n;
  g.dims.assign(n, 1);
  g.offsets = block_offsets(g.dims);
  g.total_dim = g.offsets.back();
  g.seek_sign = Eigen::VectorXd::Ones(n);
  g.gradient = [xq, r1, r2](int i, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(1);
    out(0) = -2.0 * (v(i) - xq(i)) - (r1 * v.sum() + r2) - r1 * v(i);
    return out;
  };
  g.payoff = [xq, r1, r2](int i, const Eigen::VectorXd& x) {
    double vi = x(i);
    double diff = vi - xq(i);
    return -diff * diff - vi * (r1 * x.sum() + r2);
  };
  return g;
}

GameModel connectivity_game() {
  const int n = 5;
  GameModel g;
  g.n = n;
  g.dims.assign(n, 2);
  g.offsets = block_offsets(g.dims);
  g.total_dim = g.offsets.back();
  g.seek_sign = -Eigen::VectorXd::Ones(n);
  g.gradient = [](int i, const Eigen::VectorXd& v) {
    const auto& nbrs = connectivity_neighbors();
    Eigen::Vector2d xi = v.segment<2>(2 * i);
    Eigen::Vector2d out =
        2.0 * (i + 1) * xi + Eigen::Vector2d::Constant(i + 1);
    for (int j : nbrs[i]) out += 2.0 * (xi - v.segment<2>(2 * j));
    return Eigen::VectorXd(out);
  };
  g.payoff = [](int i, const Eigen::VectorXd& x) {
    const auto& nbrs = connectivity_neighbors();
    Eigen::Vector2d xi = x.segment<2>(2 * i);
    double val = (i + 1) * xi.squaredNorm() + (i + 1) * (xi(0) + xi(1)) +
                 (i + 1);
    for (int j : nbrs[i]) val += (xi - x.segment<2>(2 * j)).squaredNorm();
    return val;
  };
  return g;
}

GameModel affine_game(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                      const std::vector<int>& dims,
                      const Eigen::VectorXd& seek) {
  require(!dims.empty(), Err::BadConfig, "dims must be nonempty");
  GameModel g;
  g.n = static_cast<int>(dims.size());
  g.dims = dims;
  g.offsets = block_offsets(g.dims);
  g.total_dim = g.offsets.back();
  require(m.rows() == g.total_dim && m.cols() == g.total_dim &&
              b.size() == g.total_dim,
          Err::DimensionMismatch,
          "coefficient sizes do not match the block dimensions");
  require(m.allFinite() && b.allFinite(), Err::BadConfig,
          "coefficients must be finite");
  if (seek.size() == 0) {
    g.seek_sign = Eigen::VectorXd::Ones(g.n);
  } else {
    require(seek.size() == g.n, Err::DimensionMismatch,
            "seek_sign must list one sign per player");
    for (int i = 0; i < g.n; ++i)
      require(seek(i) == 1.0 || seek(i) == -1.0, Err::BadConfig,
              "seek_sign entries must be +1 or -1");
    g.seek_sign = seek;
  }
  g.gradient = [m, b, offsets = g.offsets, dims](int i,
                                                 const Eigen::VectorXd& v) {
    return Eigen::VectorXd(m.middleRows(offsets[i], dims[i]) * v +
                           b.segment(offsets[i], dims[i]));
  };
  return g;
}

}  // namespace neseek
