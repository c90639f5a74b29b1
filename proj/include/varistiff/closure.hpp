#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "varistiff/common.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

/// Index of each scalar in the parameter vector theta = (a1, a2, a3, b1, b2, b3, L, xi).
enum ThetaIndex : int { kA1 = 0, kA2, kA3, kB1, kB2, kB3, kLength, kShift, kThetaSize };

using Theta = Eigen::Matrix<double, kThetaSize, 1>;

/// Shooting problem for closed curves of rho gamma'' = (a x gamma + b) x gamma'.
///
/// The stiffness used for a given theta is `profile` shifted by theta[kShift],
/// rho(s) = profile(s + xi). In periodic mode the profile must be sinusoidal
/// and is rebuilt as A sin(2 pi k s / L + xi0 + xi) + c.
struct ClosureProblem {
  StiffnessProfile profile = StiffnessProfile::sinusoidal(1.0, 1.5, 0.0);
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double length = 1.0;
  double shift = 0.0;
  Vec3 start_position = Vec3::Zero();
  Vec3 start_tangent = Vec3::UnitX();
  std::array<bool, kThetaSize> free{};
  double w_pos = 1.0;
  double w_tan = 1.0;
  /// Weight of the optional holonomy component; 0 keeps the residual in R^6.
  double w_hol = 0.0;
  std::size_t steps = 2000;
  std::optional<int> periodic_k;
  double drift_limit = 1e-3;

  int max_iter = 200;
  double tol = 1e-8;
  double step_tol = 1e-12;
  double lambda0 = 1e-3;
  double fd_rel_step = 1e-6;
  double fd_abs_step = 1e-8;

  Theta initial_theta() const;
  int free_count() const;
  std::vector<int> free_indices() const;
};

struct ClosureResult {
  Theta theta;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  /// ||r|| after every accepted step, starting with the initial value.
  std::vector<double> history;
  /// Residual evaluations that hit an integration failure and were penalized.
  int penalized = 0;
  CurveSamples curve;
};

/// Residual value used per component when the integration fails.
inline constexpr double kResidualSentinel = 1e6;

/// Stiffness profile used for a given theta.
StiffnessProfile closure_profile(const ClosureProblem& problem, const Theta& theta);

/// Integrated curve for a given theta. Throws on integration failure.
CurveSamples closure_curve(const ClosureProblem& problem, const Theta& theta);

/// (w_pos (gamma(L) - gamma(0)), w_tan (T(L) - T(0))[, w_hol holonomy]).
/// Integration failures yield kResidualSentinel in every component.
Eigen::VectorXd closing_residual(const ClosureProblem& problem, const Theta& theta);

/// Central-difference Jacobian with respect to the free scalars, in the order
/// of ThetaIndex. Step per column: max(fd_rel_step |theta_j|, fd_abs_step).
Eigen::MatrixXd fd_jacobian(const ClosureProblem& problem, const Theta& theta, Exec exec = kDefaultExec);

/// Levenberg-Marquardt on the free scalars, with L = exp(u) internally.
ClosureResult optimize(const ClosureProblem& problem, Exec exec = kDefaultExec);

}  // namespace varistiff
