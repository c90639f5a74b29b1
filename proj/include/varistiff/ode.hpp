#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "varistiff/common.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

using State = Eigen::VectorXd;

/// rho gamma'' = (a x gamma + b) x gamma'. State (gamma, T), 6 entries.
struct Cond5System {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  StiffnessProfile rho = StiffnessProfile::constant(1.0);
};

/// rho T'' + rho' T' - rho <T'', T> T = a - <a, T> T, closed with
/// <T'', T> = -|T'|^2. State (gamma, T, T'), 9 entries; planar when dim == 2.
struct PendulumSystem {
  int dim = 3;
  Vec3 a = Vec3::Zero();
  StiffnessProfile rho = StiffnessProfile::constant(1.0);
};

/// theta'' = -(q / rho) sin(theta) - (rho' / rho) theta'. State (theta, theta').
/// The tangent of the corresponding planar elastica is (sin theta, -cos theta).
struct PlanarThetaSystem {
  ScalarField q = constant_field(1.0);
  ScalarField rho = constant_field(1.0);
};

/// theta'' = -(g / l) sin(theta) - 2 (l' / l) theta'. State (theta, theta').
struct VariablePendulumSystem {
  double g = 1.0;
  ScalarField length = constant_field(1.0);
};

/// Arbitrary first-order system, mostly for testing the stepper.
struct CustomSystem {
  std::size_t dimension = 1;
  std::function<State(double, const State&)> rhs;
};

using OdeSystem = std::variant<Cond5System, PendulumSystem, PlanarThetaSystem, VariablePendulumSystem, CustomSystem>;

std::size_t state_dimension(const OdeSystem& system);

/// Right-hand side y' = f(s, y).
State evaluate_rhs(const OdeSystem& system, double s, const State& state);

/// One classical Runge-Kutta step. Throws NumericalError if the result is not
/// finite.
State rk4_step(const OdeSystem& system, const State& state, double s, double h);

struct IntegrateOptions {
  /// Renormalize T after every step (off by default so integrator error stays visible).
  bool renormalize = false;
  /// Abort once ||T| - 1| exceeds this bound.
  double drift_limit = 1e-3;
};

struct Trajectory {
  double s0 = 0.0;
  double h = 0.0;
  std::vector<State> states;
  /// Present for Cond5 and pendulum-form systems.
  std::optional<CurveSamples> curve;
  /// max_i ||T_i| - 1| for curve systems, 0 otherwise.
  double max_tangent_drift = 0.0;
};

/// Fixed-step RK4 over [s0, s0 + length] with `steps` steps.
Trajectory integrate(const OdeSystem& system, const State& init, double s0, double length, std::size_t steps,
                     const IntegrateOptions& options = {});

/// Default step count for a curve of the given length: max(1000, ceil(L / 1e-3)).
std::size_t default_steps(double length);

/// Initial state (gamma0, T0) for Cond5; T0 must be a unit vector.
State cond5_state(const Vec3& position, const Vec3& tangent);

/// Initial state (gamma0, T0, T0') for the pendulum form.
State pendulum_state(const Vec3& position, const Vec3& tangent, const Vec3& tangent_derivative);

/// Planar curve with tangent (sin theta, -cos theta) starting at the origin.
/// Positions integrate T over each cell with a three-point rule on the theta
/// samples.
CurveSamples reconstruct_planar_curve(std::span<const double> theta, double h, double s0 = 0.0);

/// First component of every state in a trajectory.
std::vector<double> first_components(const Trajectory& trajectory);

}  // namespace varistiff
