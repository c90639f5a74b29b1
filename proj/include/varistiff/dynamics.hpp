#pragma once

#include <span>
#include <vector>

#include "varistiff/common.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/ode.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

struct PendulumComparison {
  double max_deviation = 0.0;
  std::vector<double> variable_length;
  std::vector<double> planar_theta;
};

/// Integrates theta'' = -(g/l) sin(theta) - 2 (l'/l) theta' and the planar
/// elastica equation with rho = l^2, q = g l from the same initial data on the
/// same grid, and compares the two angle trajectories.
PendulumComparison pendulum_equivalence_check(double g, const ScalarField& length, double theta0, double dtheta0,
                                              double s0, double span, std::size_t steps);

/// Thin filament whose core thickness a(s) = a1^rho(s) sets the local
/// stiffness. epsilon = log(a0) / log(a1).
struct VortexConfig {
  StiffnessProfile profile = StiffnessProfile::constant(1.0);
  double c2 = 0.0;
  double a0 = 1e-2;
  double a1 = 1e-4;
  double epsilon = 0.5;

  static VortexConfig make(StiffnessProfile profile, double c2, double a0, double a1);
  /// Throws ConfigError unless 0 < a1 < a0 < 1 and epsilon matches a0, a1.
  void validate() const;
};

/// Leading-order filament velocity -rho T x T' - c2 rho' T.
std::vector<Vec3> vortex_velocity(const CurveSamples& curve, const VortexConfig& config, Exec exec = kDefaultExec);

struct KillingFit {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double residual_rms = 0.0;
  bool rank_deficient = false;
};

/// Least-squares infinitesimal rigid motion x -> omega x x + v matching the
/// normal part of `velocity`; tangential parts are ignored. Minimum-norm
/// solution when the curve does not determine the motion (straight lines).
KillingFit killing_fit(const CurveSamples& curve, std::span<const Vec3> velocity, Exec exec = kDefaultExec);

}  // namespace varistiff
