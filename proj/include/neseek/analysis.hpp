#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"

namespace neseek {

// Constants of the convergence certificate for the seeking dynamics. The
// composite Lyapunov function is V = 0.5 |e|^2 + e_x' P e_x with
// e = x - x_star and e_x = y - 1_n (x) x. The fixed quadratic action part
// pins gamma1 = gamma2 = 1/2 and gamma4 = 1; gamma5 is a +inf sentinel kept
// only for completeness (the quadratic certificate has no domain radius).
// mu1 is the decay rate available while communicating, mu2 the growth rate
// admitted while silent; mu2_alt is a literal-transcription variant
// (lambda_min(Gamma1)/eta1) kept inspectable for comparison, and is not used
// by any condition check.
struct TheoremConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double gamma3 = 0.0;
  double gamma4 = 1.0;
  double gamma5 = 0.0;        // set to +inf by build_constants
  bool gamma3_exact = false;  // true when gamma3 came from affine structure
  double kbar_min = 0.0;
  double kbar_max = 0.0;
  double p_min = 0.0;   // lambda_min(P)
  double p_norm = 0.0;  // spectral norm of P
  double q_min = 0.0;   // lambda_min(Q)
  double pi1 = 0.0;
  double pi2 = 0.0;
  double eps1_star = 0.0;
  double eps2_star = 0.0;
  double eps_star = 0.0;
  double epsilon = 0.0;  // the gain scale these constants assume
  bool epsilon_exceeds_star = false;  // epsilon >= eps_star: mu1 may be <= 0
  Eigen::Matrix2d big_gamma1;
  Eigen::Matrix2d big_gamma2;
  double eta1 = 0.0;  // min(gamma1, lambda_min(P))
  double eta2 = 0.0;  // max(gamma2, spectral norm of P)
  double mu1 = 0.0;   // lambda_min(Gamma1) / eta2
  double mu2 = 0.0;   // lambda_max(Gamma2) / eta1
  double mu2_alt = 0.0;
};

// Assembles the constants from measured regularity, per-player gains, a
// Lyapunov certificate for the estimate coupling, and the gain scale.
// gamma3 falls back to min(kbar) * beta. Requires beta > 0 (NonPositiveBeta)
// and a positive-definite certificate. epsilon >= eps_star is not an error:
// the flag epsilon_exceeds_star is set and mu1 may come out nonpositive.
TheoremConstants build_constants(const RegularityConstants& reg,
                                 const Eigen::VectorXd& kbar,
                                 const LyapunovCertificate& cert,
                                 double epsilon);

// Same, but computes gamma3 exactly as lambda_min of the symmetric part of
// -diag{kbar} times the oriented affine coefficient matrix when the game is
// affine; non-affine games fall back to min(kbar) * beta.
TheoremConstants build_constants(const GameModel& game,
                                 const RegularityConstants& reg,
                                 const Eigen::VectorXd& kbar,
                                 const LyapunovCertificate& cert,
                                 double epsilon);

enum class Regime { PIC, AIC, MinRatio, ACR };
const char* regime_name(Regime regime);

struct ConditionReport {
  Regime regime = Regime::PIC;
  bool satisfied = false;
  double margin = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double eps_star = 0.0;
  // echoed inputs, named: e.g. {"theta_tilde", 0.5}
  std::vector<std::pair<std::string, double>> inputs;
};

// Periodic windows with duty ratio theta_tilde in (0, 1):
// margin = mu1 theta_tilde - mu2 (1 - theta_tilde).
ConditionReport check_pic(const TheoremConstants& c, double theta_tilde);

// Quasi-periodic windows with width at least theta_bar and opening spacing
// at most t_bar, 0 < theta_bar < t_bar:
// margin = mu1 theta_bar - mu2 (t_bar - theta_bar).
ConditionReport check_aic(const TheoremConstants& c, double theta_bar,
                          double t_bar);

// Silent-time ratio bound zeta_bar in (0, 1):
// margin = mu1 (1 - zeta_bar) - mu2 zeta_bar.
ConditionReport check_min_ratio(const TheoremConstants& c, double zeta_bar);

// Average communication rate vartheta in (0, 1): satisfied exactly when
// vartheta (mu1 + mu2) - mu2 > 0; margin is the decay exponent
// mu1 vartheta - mu2 (1 - vartheta).
ConditionReport check_acr_condition(const TheoremConstants& c,
                                    double vartheta);

// Expands a certificate computed for the scalar estimate coupling to games
// whose players share one uniform action dimension (per-coordinate
// replication; the expanded matrices are permutation-similar to P (x) I_d).
// Non-uniform dimensions raise DimensionMismatch.
LyapunovCertificate lift_certificate(const LyapunovCertificate& cert,
                                     const std::vector<int>& dims);

// V(t) per sample: 0.5 |x - x_star|^2 + e_x' P e_x. The certificate must
// match the estimate stack width (lift it first for multi-dimensional
// actions).
std::vector<double> lyapunov_trace(const Trajectory& traj,
                                   const Eigen::VectorXd& x_star,
                                   const LyapunovCertificate& cert);

// Negated least-squares slope of ln V against t over samples with
// t_a <= t <= t_b (positive result = decay). Samples below 1e-14 times the
// first series value are excluded as noise; any nonpositive V inside the
// window raises NonPositiveValues.
double fit_exponential_rate(const std::vector<double>& times,
                            const std::vector<double>& v, double t_a,
                            double t_b);

}  // namespace neseek
