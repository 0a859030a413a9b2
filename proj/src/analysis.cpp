#include "neseek/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neseek {
namespace {

struct SpectrumBounds {
  double min = 0.0;
  double max = 0.0;
};

SpectrumBounds symmetric_spectrum(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  require(es.info() == Eigen::Success, Err::SingularSystem,
          "eigendecomposition failed");
  SpectrumBounds b;
  b.min = es.eigenvalues().minCoeff();
  b.max = es.eigenvalues().maxCoeff();
  return b;
}

TheoremConstants assemble(const RegularityConstants& reg,
                          const Eigen::VectorXd& kbar,
                          const LyapunovCertificate& cert, double epsilon,
                          double gamma3, bool gamma3_exact) {
  require(std::isfinite(epsilon) && epsilon > 0.0, Err::BadConfig,
          "epsilon must be positive and finite");
  const int n = static_cast<int>(kbar.size());
  require(n >= 1, Err::BadConfig, "kbar must be nonempty");
  for (int i = 0; i < n; ++i)
    require(std::isfinite(kbar(i)) && kbar(i) > 0.0, Err::BadConfig,
            "gain of player " + std::to_string(i) + " must be positive");
  require(reg.alpha > 0.0 && std::isfinite(reg.alpha), Err::BadConfig,
          "Lipschitz constant must be positive");
  require(reg.beta > 0.0, Err::NonPositiveBeta,
          "the oriented pseudo-gradient is not strongly monotone (beta = " +
              std::to_string(reg.beta) + ")");
  require(gamma3 > 0.0, Err::NonPositiveBeta,
          "gain-weighted monotonicity constant is not positive (gamma3 = " +
              std::to_string(gamma3) + ")");
  require(cert.p.rows() == cert.p.cols() && cert.q.rows() == cert.q.cols() &&
              cert.p.rows() == cert.q.rows(),
          Err::DimensionMismatch, "certificate matrices must be square");
  require(cert.p.rows() == static_cast<Eigen::Index>(n) * n,
          Err::DimensionMismatch,
          "certificate is sized for a different player count");

  TheoremConstants c;
  c.alpha = reg.alpha;
  c.beta = reg.beta;
  c.gamma3 = gamma3;
  c.gamma3_exact = gamma3_exact;
  c.gamma5 = std::numeric_limits<double>::infinity();
  c.kbar_min = kbar.minCoeff();
  c.kbar_max = kbar.maxCoeff();

  SpectrumBounds pb = symmetric_spectrum(cert.p);
  SpectrumBounds qb = symmetric_spectrum(cert.q);
  require(pb.min > 0.0 && qb.min > 0.0, Err::BadConfig,
          "certificate matrices must be positive definite");
  c.p_min = pb.min;
  c.p_norm = pb.max;
  c.q_min = qb.min;

  c.pi1 = c.alpha * c.kbar_max * (c.gamma4 / 2.0 + n * c.p_norm);
  c.pi2 = 2.0 * c.alpha * std::sqrt(static_cast<double>(n)) * c.p_norm *
          c.kbar_max;
  c.eps1_star = c.gamma3 * c.q_min / (c.gamma3 * c.pi2 + c.pi1 * c.pi1);
  c.eps2_star =
      c.gamma3 * c.gamma3 * c.pi2 * c.pi2 / std::pow(c.pi1, 4);
  c.eps_star = std::min(c.eps1_star, c.eps2_star);
  c.epsilon = epsilon;
  c.epsilon_exceeds_star = epsilon >= c.eps_star;

  c.big_gamma1 << epsilon * c.gamma3, -epsilon * c.pi1,
      -epsilon * c.pi1, c.q_min - epsilon * c.pi2;
  c.big_gamma2 << std::sqrt(epsilon) * c.gamma3, epsilon * c.pi1,
      epsilon * c.pi1, epsilon * c.pi2;

  c.eta1 = std::min(c.gamma1, c.p_min);
  c.eta2 = std::max(c.gamma2, c.p_norm);
  SpectrumBounds g1 = symmetric_spectrum(c.big_gamma1);
  SpectrumBounds g2 = symmetric_spectrum(c.big_gamma2);
  c.mu1 = g1.min / c.eta2;
  c.mu2 = g2.max / c.eta1;
  c.mu2_alt = g1.min / c.eta1;
  return c;
}

ConditionReport report_for(const TheoremConstants& c, Regime regime,
                           double margin, bool satisfied,
                           std::vector<std::pair<std::string, double>> inputs) {
  ConditionReport r;
  r.regime = regime;
  r.margin = margin;
  r.satisfied = satisfied;
  r.mu1 = c.mu1;
  r.mu2 = c.mu2;
  r.eps_star = c.eps_star;
  r.inputs = std::move(inputs);
  return r;
}

}  // namespace

TheoremConstants build_constants(const RegularityConstants& reg,
                                 const Eigen::VectorXd& kbar,
                                 const LyapunovCertificate& cert,
                                 double epsilon) {
  double gamma3 = (kbar.size() > 0 ? kbar.minCoeff() : 0.0) * reg.beta;
  return assemble(reg, kbar, cert, epsilon, gamma3, false);
}

TheoremConstants build_constants(const GameModel& game,
                                 const RegularityConstants& reg,
                                 const Eigen::VectorXd& kbar,
                                 const LyapunovCertificate& cert,
                                 double epsilon) {
  require(kbar.size() == game.n, Err::DimensionMismatch,
          "kbar must list one gain per player");
  try {
    AffineForm form = affine_coefficients(game);
    // Exact gain-weighted modulus: lambda_min of the symmetric part of
    // -K S M, K = diag blocks kbar_i I, S = diag blocks seek_sign_i I.
    Eigen::MatrixXd scaled = form.m;
    for (int i = 0; i < game.n; ++i)
      scaled.middleRows(game.offsets[i], game.dims[i]) *=
          kbar(i) * game.seek_sign(i);
    Eigen::MatrixXd sym = -0.5 * (scaled + scaled.transpose());
    double gamma3 = symmetric_spectrum(sym).min;
    return assemble(reg, kbar, cert, epsilon, gamma3, true);
  } catch (const Error& e) {
    if (e.code() != Err::NotAffine) throw;
  }
  return build_constants(reg, kbar, cert, epsilon);
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::PIC:
      return "PIC";
    case Regime::AIC:
      return "AIC";
    case Regime::MinRatio:
      return "MinRatio";
    case Regime::ACR:
      return "ACR";
  }
  return "unknown";
}

ConditionReport check_pic(const TheoremConstants& c, double theta_tilde) {
  require(theta_tilde > 0.0 && theta_tilde < 1.0, Err::BadRatio,
          "communication ratio must lie in (0, 1), got " +
              std::to_string(theta_tilde));
  double margin = c.mu1 * theta_tilde - c.mu2 * (1.0 - theta_tilde);
  return report_for(c, Regime::PIC, margin, margin > 0.0,
                    {{"theta_tilde", theta_tilde}});
}

ConditionReport check_aic(const TheoremConstants& c, double theta_bar,
                          double t_bar) {
  require(theta_bar > 0.0 && theta_bar < t_bar, Err::BadRatio,
          "need 0 < theta_bar < t_bar, got theta_bar = " +
              std::to_string(theta_bar) + ", t_bar = " +
              std::to_string(t_bar));
  double margin = c.mu1 * theta_bar - c.mu2 * (t_bar - theta_bar);
  return report_for(c, Regime::AIC, margin, margin > 0.0,
                    {{"theta_bar", theta_bar}, {"t_bar", t_bar}});
}

ConditionReport check_min_ratio(const TheoremConstants& c, double zeta_bar) {
  require(zeta_bar > 0.0 && zeta_bar < 1.0, Err::BadRatio,
          "silent-time ratio must lie in (0, 1), got " +
              std::to_string(zeta_bar));
  double margin = c.mu1 * (1.0 - zeta_bar) - c.mu2 * zeta_bar;
  return report_for(c, Regime::MinRatio, margin, margin > 0.0,
                    {{"zeta_bar", zeta_bar}});
}

ConditionReport check_acr_condition(const TheoremConstants& c,
                                    double vartheta) {
  require(vartheta > 0.0 && vartheta < 1.0, Err::BadRatio,
          "average communication rate must lie in (0, 1), got " +
              std::to_string(vartheta));
  double margin = c.mu1 * vartheta - c.mu2 * (1.0 - vartheta);
  bool satisfied = vartheta * (c.mu1 + c.mu2) - c.mu2 > 0.0;
  return report_for(c, Regime::ACR, margin, satisfied,
                    {{"vartheta", vartheta}});
}

LyapunovCertificate lift_certificate(const LyapunovCertificate& cert,
                                     const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  require(n >= 1, Err::BadConfig, "dims must be nonempty");
  require(cert.p.rows() == static_cast<Eigen::Index>(n) * n,
          Err::DimensionMismatch,
          "certificate is sized for a different player count");
  const int d = dims[0];
  for (int di : dims)
    require(di == d, Err::DimensionMismatch,
            "certificate lifting requires one uniform action dimension");
  require(d >= 1, Err::BadConfig, "action dimensions must be positive");
  if (d == 1) return cert;

  const int total = n * d;
  LyapunovCertificate out;
  out.p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * total,
                                static_cast<Eigen::Index>(n) * total);
  out.q = out.p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double pv = cert.p(i * n + j, k * n + l);
          double qv = cert.q(i * n + j, k * n + l);
          if (pv == 0.0 && qv == 0.0) continue;
          for (int ci = 0; ci < d; ++ci) {
            out.p(i * total + j * d + ci, k * total + l * d + ci) = pv;
            out.q(i * total + j * d + ci, k * total + l * d + ci) = qv;
          }
        }
  // per-coordinate replication scales the Frobenius residual by sqrt(d)
  out.residual = cert.residual * std::sqrt(static_cast<double>(d));
  return out;
}

std::vector<double> lyapunov_trace(const Trajectory& traj,
                                   const Eigen::VectorXd& x_star,
                                   const LyapunovCertificate& cert) {
  const int m = static_cast<int>(traj.x_samples.rows());
  const int d = static_cast<int>(traj.x_samples.cols());
  const int nd = static_cast<int>(traj.y_samples.cols());
  require(x_star.size() == d, Err::DimensionMismatch,
          "equilibrium has " + std::to_string(x_star.size()) +
              " entries, expected " + std::to_string(d));
  require(traj.y_samples.rows() == m, Err::DimensionMismatch,
          "sample counts of actions and estimates differ");
  require(d > 0 && nd % d == 0, Err::DimensionMismatch,
          "estimate stack width is not a multiple of the action width");
  require(cert.p.rows() == nd && cert.p.cols() == nd, Err::DimensionMismatch,
          "certificate size " + std::to_string(cert.p.rows()) +
              " does not match the estimate stack width " +
              std::to_string(nd));
  const int n = nd / d;
  std::vector<double> v(m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd xt = traj.x_samples.row(k).transpose();
    Eigen::VectorXd ex = traj.y_samples.row(k).transpose();
    for (int i = 0; i < n; ++i) ex.segment(i * d, d) -= xt;
    v[k] = 0.5 * (xt - x_star).squaredNorm() + ex.dot(cert.p * ex);
  }
  return v;
}

double fit_exponential_rate(const std::vector<double>& times,
                            const std::vector<double>& v, double t_a,
                            double t_b) {
  require(times.size() == v.size(), Err::DimensionMismatch,
          "series lengths differ");
  require(!times.empty(), Err::BadRange, "series is empty");
  require(t_a < t_b, Err::BadRange, "need t_a < t_b");
  const double floor = 1e-14 * v.front();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a || times[i] > t_b) continue;
    require(v[i] > 0.0, Err::NonPositiveValues,
            "series value " + std::to_string(v[i]) + " at t = " +
                std::to_string(times[i]) + " is not positive");
    if (v[i] < floor) continue;  // below the fitting noise floor
    pts.emplace_back(times[i], std::log(v[i]));
  }
  require(pts.size() >= 2, Err::BadRange,
          "window holds fewer than two usable samples");
  double mean_t = 0.0;
  double mean_l = 0.0;
  for (const auto& [t, l] : pts) {
    mean_t += t;
    mean_l += l;
  }
  mean_t /= static_cast<double>(pts.size());
  mean_l /= static_cast<double>(pts.size());
  double num = 0.0;
  double den = 0.0;
  for (const auto& [t, l] : pts) {
    num += (t - mean_t) * (l - mean_l);
    den += (t - mean_t) * (t - mean_t);
  }
  require(den > 0.0, Err::BadRange, "window holds no time spread");
  return -num / den;
}

}  // namespace neseek
