#include "varistiff/dynamics.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace varistiff {

namespace {

Mat3 cross_matrix(const Vec3& p) {
  Mat3 m;
  m << 0.0, -p.z(), p.y(), p.z(), 0.0, -p.x(), -p.y(), p.x(), 0.0;
  return m;
}

}  // namespace

PendulumComparison pendulum_equivalence_check(double g, const ScalarField& length, double theta0, double dtheta0,
                                              double s0, double span, std::size_t steps) {
  VariablePendulumSystem pend{g, length};
  PlanarThetaSystem elastica;
  elastica.rho = [length](double s) {
    const Jet l = length(s);
    return l * l;
  };
  elastica.q = [length, g](double s) { return g * length(s); };

  State init(2);
  init << theta0, dtheta0;
  PendulumComparison out;
  out.variable_length = first_components(integrate(pend, init, s0, span, steps));
  out.planar_theta = first_components(integrate(elastica, init, s0, span, steps));
  for (std::size_t i = 0; i < out.planar_theta.size(); ++i) {
    out.max_deviation = std::max(out.max_deviation, std::abs(out.planar_theta[i] - out.variable_length[i]));
  }
  return out;
}

VortexConfig VortexConfig::make(StiffnessProfile profile, double c2, double a0, double a1) {
  VortexConfig c;
  c.profile = std::move(profile);
  c.c2 = c2;
  c.a0 = a0;
  c.a1 = a1;
  c.epsilon = std::log(a0) / std::log(a1);
  c.validate();
  return c;
}

void VortexConfig::validate() const {
  if (!std::isfinite(c2)) throw ConfigError("vortex c2 must be finite");
  if (!(a1 > 0.0 && a1 < a0 && a0 < 1.0)) throw ConfigError("vortex scales need 0 < a1 < a0 < 1");
  if (std::abs(epsilon - std::log(a0) / std::log(a1)) > 1e-12) {
    throw ConfigError("vortex epsilon does not match log(a0) / log(a1)");
  }
}

std::vector<Vec3> vortex_velocity(const CurveSamples& curve, const VortexConfig& config, Exec exec) {
  if (curve.dim != 3) throw ConfigError("vortex velocity needs a space curve (dim 3)");
  const TangentJets j = tangent_jets(curve, 1);
  std::vector<Jet> rho(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) rho[i] = eval_stiffness(config.profile, curve.arc_length(i));
  std::vector<Vec3> vel(curve.size());
  for_each_index(exec, curve.size(), [&](std::size_t i) {
    vel[i] = -rho[i].value * j.T[i].cross(j.d1[i]) - config.c2 * rho[i].d1 * j.T[i];
  });
  return vel;
}

KillingFit killing_fit(const CurveSamples& curve, std::span<const Vec3> velocity, Exec exec) {
  const std::size_t n = curve.size();
  if (velocity.size() != n) {
    throw ConfigError("velocity has " + std::to_string(velocity.size()) + " samples, curve has " + std::to_string(n));
  }
  if (n < 3) throw ConfigError("killing fit needs at least 3 samples");
  const TangentJets j = tangent_jets(curve, 0);
  const auto rows = static_cast<Eigen::Index>(3 * n);
  Eigen::MatrixXd m(rows, 6);
  Eigen::VectorXd rhs(rows);
  for_each_index(exec, n, [&](std::size_t i) {
    const Vec3& t = j.T[i];
    const Mat3 proj = Mat3::Identity() - t * t.transpose();
    const auto r = static_cast<Eigen::Index>(3 * i);
    // omega x p = -[p]x omega
    m.block<3, 3>(r, 0) = -proj * cross_matrix(curve.positions[i]);
    m.block<3, 3>(r, 3) = proj;
    rhs.segment<3>(r) = proj * velocity[i];
  });
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  cod.setThreshold(1e-10);
  const Eigen::VectorXd x = cod.solve(rhs);
  KillingFit fit;
  fit.omega = x.head<3>();
  fit.v = x.tail<3>();
  fit.rank_deficient = cod.rank() < 6;
  fit.residual_rms = (m * x - rhs).norm() / std::sqrt(static_cast<double>(n));
  return fit;
}

}  // namespace varistiff
