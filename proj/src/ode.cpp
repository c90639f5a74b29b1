#include "varistiff/ode.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

namespace varistiff {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_curve_system(const OdeSystem& system) {
  return std::holds_alternative<Cond5System>(system) || std::holds_alternative<PendulumSystem>(system);
}

State cond5_rhs(const Cond5System& sys, double s, const State& y) {
  const Vec3 gamma = y.segment<3>(0);
  const Vec3 t = y.segment<3>(3);
  const double rho = eval_stiffness(sys.rho, s).value;
  State dy(6);
  dy.segment<3>(0) = t;
  dy.segment<3>(3) = (sys.a.cross(gamma) + sys.b).cross(t) / rho;
  return dy;
}

State pendulum_rhs(const PendulumSystem& sys, double s, const State& y) {
  const Vec3 t = y.segment<3>(3);
  const Vec3 dt = y.segment<3>(6);
  const Jet rho = eval_stiffness(sys.rho, s);
  State dy(9);
  dy.segment<3>(0) = t;
  dy.segment<3>(3) = dt;
  dy.segment<3>(6) = (sys.a - sys.a.dot(t) * t - rho.d1 * dt) / rho.value - dt.squaredNorm() * t;
  return dy;
}

State theta_rhs(const PlanarThetaSystem& sys, double s, const State& y) {
  const Jet rho = sys.rho(s);
  if (!(rho.value > 0.0)) throw DomainError("bending stiffness must be positive");
  const double q = sys.q(s).value;
  State dy(2);
  dy[0] = y[1];
  dy[1] = -(q / rho.value) * std::sin(y[0]) - (rho.d1 / rho.value) * y[1];
  return dy;
}

State variable_pendulum_rhs(const VariablePendulumSystem& sys, double s, const State& y) {
  const Jet len = sys.length(s);
  if (!(len.value > 0.0)) throw DomainError("pendulum length must be positive");
  State dy(2);
  dy[0] = y[1];
  dy[1] = -(sys.g / len.value) * std::sin(y[0]) - 2.0 * (len.d1 / len.value) * y[1];
  return dy;
}

double tangent_drift(const State& y) { return std::abs(y.segment<3>(3).norm() - 1.0); }

}  // namespace

std::size_t state_dimension(const OdeSystem& system) {
  return std::visit(Overloaded{[](const Cond5System&) -> std::size_t { return 6; },
                               [](const PendulumSystem&) -> std::size_t { return 9; },
                               [](const PlanarThetaSystem&) -> std::size_t { return 2; },
                               [](const VariablePendulumSystem&) -> std::size_t { return 2; },
                               [](const CustomSystem& c) -> std::size_t { return c.dimension; }},
                    system);
}

State evaluate_rhs(const OdeSystem& system, double s, const State& state) {
  return std::visit(Overloaded{[&](const Cond5System& sys) { return cond5_rhs(sys, s, state); },
                               [&](const PendulumSystem& sys) { return pendulum_rhs(sys, s, state); },
                               [&](const PlanarThetaSystem& sys) { return theta_rhs(sys, s, state); },
                               [&](const VariablePendulumSystem& sys) { return variable_pendulum_rhs(sys, s, state); },
                               [&](const CustomSystem& sys) { return sys.rhs(s, state); }},
                    system);
}

State rk4_step(const OdeSystem& system, const State& state, double s, double h) {
  if (!(h > 0.0)) throw ConfigError("RK4 step size must be positive");
  if (static_cast<std::size_t>(state.size()) != state_dimension(system)) {
    throw ConfigError("state has dimension " + std::to_string(state.size()) + ", system expects " +
                      std::to_string(state_dimension(system)));
  }
  const double half = 0.5 * h;
  const State k1 = evaluate_rhs(system, s, state);
  const State k2 = evaluate_rhs(system, s + half, state + half * k1);
  const State k3 = evaluate_rhs(system, s + half, state + half * k2);
  const State k4 = evaluate_rhs(system, s + h, state + h * k3);
  State next = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalError("integration overflow", s + h);
  return next;
}

std::size_t default_steps(double length) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(length / 1e-3)));
}

Trajectory integrate(const OdeSystem& system, const State& init, double s0, double length, std::size_t steps,
                     const IntegrateOptions& options) {
  if (steps < 2) throw ConfigError("steps must be at least 2, got " + std::to_string(steps));
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("integration length must be positive");
  if (static_cast<std::size_t>(init.size()) != state_dimension(system)) {
    throw ConfigError("initial state has dimension " + std::to_string(init.size()) + ", system expects " +
                      std::to_string(state_dimension(system)));
  }
  const bool curve_kind = is_curve_system(system);
  if (curve_kind && tangent_drift(init) > 1e-10) throw ConfigError("initial tangent must be a unit vector");

  Trajectory traj;
  traj.s0 = s0;
  traj.h = length / static_cast<double>(steps);
  traj.states.reserve(steps + 1);
  traj.states.push_back(init);
  State y = init;
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = s0 + static_cast<double>(i) * traj.h;
    y = rk4_step(system, y, s, traj.h);
    if (curve_kind) {
      const double drift = tangent_drift(y);
      traj.max_tangent_drift = std::max(traj.max_tangent_drift, drift);
      if (drift > options.drift_limit) {
        std::ostringstream os;
        os << "tangent length drifted by " << drift << " beyond the limit " << options.drift_limit;
        throw NumericalError(os.str(), s + traj.h);
      }
      if (options.renormalize) y.segment<3>(3).normalize();
    }
    traj.states.push_back(y);
  }

  if (curve_kind) {
    CurveSamples curve;
    curve.dim = std::holds_alternative<PendulumSystem>(system) ? std::get<PendulumSystem>(system).dim : 3;
    curve.s0 = s0;
    curve.h = traj.h;
    curve.positions.reserve(traj.states.size());
    curve.tangents.reserve(traj.states.size());
    for (const auto& st : traj.states) {
      curve.positions.emplace_back(st.segment<3>(0));
      curve.tangents.emplace_back(st.segment<3>(3));
    }
    traj.curve = std::move(curve);
  }
  return traj;
}

namespace {

void require_unit(const Vec3& tangent) {
  if (std::abs(tangent.norm() - 1.0) > 1e-10) {
    throw ConfigError("initial tangent must be a unit vector, |T0| = " + std::to_string(tangent.norm()));
  }
}

}  // namespace

State cond5_state(const Vec3& position, const Vec3& tangent) {
  require_unit(tangent);
  State y(6);
  y << position, tangent;
  return y;
}

State pendulum_state(const Vec3& position, const Vec3& tangent, const Vec3& tangent_derivative) {
  require_unit(tangent);
  State y(9);
  y << position, tangent, tangent_derivative;
  return y;
}

CurveSamples reconstruct_planar_curve(std::span<const double> theta, double h, double s0) {
  const std::size_t n = theta.size();
  if (n < 2) throw ConfigError("planar reconstruction needs at least two theta samples");
  CurveSamples curve;
  curve.dim = 2;
  curve.s0 = s0;
  curve.h = h;
  curve.tangents.resize(n);
  for (std::size_t i = 0; i < n; ++i) curve.tangents[i] = Vec3(std::sin(theta[i]), -std::cos(theta[i]), 0.0);
  curve.positions.resize(n);
  curve.positions[0] = Vec3::Zero();
  const auto& t = curve.tangents;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Vec3 cell;
    if (n == 2) {
      cell = 0.5 * h * (t[0] + t[1]);
    } else if (i + 2 < n) {
      cell = (h / 12.0) * (5.0 * t[i] + 8.0 * t[i + 1] - t[i + 2]);
    } else {
      cell = (h / 12.0) * (-t[i - 1] + 8.0 * t[i] + 5.0 * t[i + 1]);
    }
    curve.positions[i + 1] = curve.positions[i] + cell;
  }
  return curve;
}

std::vector<double> first_components(const Trajectory& trajectory) {
  std::vector<double> out;
  out.reserve(trajectory.states.size());
  for (const auto& st : trajectory.states) out.push_back(st[0]);
  return out;
}

}  // namespace varistiff
