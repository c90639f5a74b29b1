#include "varistiff/curve.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "varistiff/finite_difference.hpp"

namespace varistiff {

namespace {

constexpr double kSpacingTolerance = 1e-4;
constexpr double kUnitTolerance = 1e-8;
constexpr double kFrameTolerance = 1e-10;
constexpr double kDegenerateSeed = 1e-8;

Vec2 quarter_turn(const Vec3& v) { return {-v.y(), v.x()}; }

}  // namespace

void validate_curve(const CurveSamples& curve) {
  if (curve.dim != 2 && curve.dim != 3) throw ConfigError("curve dimension must be 2 or 3");
  if (!(curve.h > 0.0) || !std::isfinite(curve.h)) throw ConfigError("curve grid spacing h must be positive");
  if (curve.size() < 2) throw ConfigError("curve needs at least two samples");
  if (curve.has_tangents() && curve.tangents.size() != curve.size()) {
    throw ConfigError("curve has " + std::to_string(curve.tangents.size()) + " tangents for " +
                      std::to_string(curve.size()) + " positions");
  }
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double step = (curve.positions[i + 1] - curve.positions[i]).norm();
    if (std::abs(step - curve.h) > kSpacingTolerance * curve.h) {
      std::ostringstream os;
      os << "curve is not arc-length parameterized: |p[" << i + 1 << "] - p[" << i << "]| = " << step
         << " but h = " << curve.h;
      throw ConfigError(os.str());
    }
  }
  for (std::size_t i = 0; i < curve.tangents.size(); ++i) {
    if (std::abs(curve.tangents[i].norm() - 1.0) > kUnitTolerance) {
      throw ConfigError("tangent " + std::to_string(i) + " is not a unit vector");
    }
  }
  if (curve.dim == 2) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve.positions[i].z() != 0.0 || (curve.has_tangents() && curve.tangents[i].z() != 0.0)) {
        throw ConfigError("planar curve has a nonzero z component at sample " + std::to_string(i));
      }
    }
  }
}

TangentJets tangent_jets(const CurveSamples& curve, int max_order) {
  TangentJets jets;
  if (curve.has_tangents()) {
    jets.T = curve.tangents;
  } else {
    jets.T = finite_difference(curve.positions, curve.h, 1);
    for (auto& t : jets.T) t.normalize();
  }
  if (max_order >= 1) jets.d1 = finite_difference(jets.T, curve.h, 1);
  if (max_order >= 2) jets.d2 = finite_difference(jets.T, curve.h, 2);
  if (max_order >= 3) jets.d3 = finite_difference(jets.T, curve.h, 3);
  return jets;
}

std::vector<Vec3> derive(const CurveSamples& curve, int order) {
  return finite_difference(curve.positions, curve.h, order);
}

std::vector<Vec3> parallel_transport(std::span<const Vec3> tangents, const Vec3& start) {
  const std::size_t n = tangents.size();
  std::vector<Vec3> z(n);
  if (n == 0) return z;
  Vec3 prev = tangents[0].normalized();
  Vec3 current = start - start.dot(prev) * prev;
  current.normalize();
  z[0] = current;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 next = tangents[i + 1].normalized();
    const double c = prev.dot(next);
    if (c <= -1.0 + 1e-12) throw ConfigError("curve tangent reverses between samples " + std::to_string(i) + " and " + std::to_string(i + 1));
    // Rodrigues rotation about prev x next by the angle between the tangents.
    const Vec3 k = prev.cross(next);
    current = c * current + k.cross(current) + (k.dot(current) / (1.0 + c)) * k;
    // Remove the rounding error so the field stays orthonormal to T.
    current -= current.dot(next) * next;
    current.normalize();
    z[i + 1] = current;
    prev = next;
  }
  return z;
}

Vec3 default_seed_normal(const Vec3& tangent) {
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(tangent[k]) < std::abs(tangent[axis])) axis = k;
  }
  Vec3 seed = Vec3::Unit(axis);
  seed -= seed.dot(tangent) * tangent;
  return seed.normalized();
}

FrameField parallel_frame(const CurveSamples& curve, std::optional<Vec3> seed_normal) {
  const TangentJets jets = tangent_jets(curve, 1);
  const std::size_t n = curve.size();
  FrameField frame;
  frame.dim = curve.dim;
  frame.n1.resize(n);
  frame.kappa.resize(n);

  if (curve.dim == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 jt = quarter_turn(jets.T[i]);
      frame.n1[i] = Vec3(-jt.x(), -jt.y(), 0.0);
      frame.kappa[i] = Vec2(-jets.d1[i].dot(frame.n1[i]), 0.0);
    }
    return frame;
  }

  Vec3 seed;
  if (seed_normal) {
    seed = *seed_normal - seed_normal->dot(jets.T[0]) * jets.T[0];
    if (seed.norm() < kDegenerateSeed * std::max(1.0, seed_normal->norm())) {
      throw ConfigError("seed normal is parallel to the tangent at the start of the curve");
    }
  } else {
    seed = default_seed_normal(jets.T[0]);
  }
  frame.n1 = parallel_transport(jets.T, seed);
  frame.n2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    frame.n2[i] = jets.T[i].cross(frame.n1[i]);
    frame.kappa[i] = Vec2(-jets.d1[i].dot(frame.n1[i]), -jets.d1[i].dot(frame.n2[i]));
  }
  return frame;
}

std::pair<Vec3, Vec3> endpoint_tangents(const CurveSamples& curve) {
  if (curve.has_tangents()) return {curve.tangents.front(), curve.tangents.back()};
  const TangentJets jets = tangent_jets(curve, 0);
  return {jets.T.front(), jets.T.back()};
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

double holonomy(const CurveSamples& curve, const HolonomyFrame& frame) {
  if (curve.dim != 3) throw ConfigError("holonomy is defined for space curves only");
  const TangentJets jets = tangent_jets(curve, 1);
  const Vec3& ta = jets.T.front();
  const Vec3& tb = jets.T.back();
  auto check = [](const Vec3& w, const Vec3& t, const char* name) {
    if (std::abs(w.norm() - 1.0) > kFrameTolerance || std::abs(w.dot(t)) > kFrameTolerance) {
      throw ConfigError(std::string("holonomy frame vector ") + name +
                        " must be a unit vector orthogonal to the end tangent");
    }
  };
  check(frame.wa, ta, "W_a");
  check(frame.wb, tb, "W_b");
  const std::vector<Vec3> z = parallel_transport(jets.T, frame.wa);
  const Vec3& zb = z.back();
  return std::atan2(zb.dot(tb.cross(frame.wb)), zb.dot(frame.wb));
}

double bending_energy(const CurveSamples& curve, const StiffnessProfile& profile) {
  const TangentJets jets = tangent_jets(curve, 1);
  std::vector<double> density(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double rho = eval_stiffness(profile, curve.arc_length(i)).value;
    density[i] = 0.5 * rho * jets.d1[i].squaredNorm();
  }
  return trapezoid(density, curve.h);
}

double length_variation(const CurveSamples& curve, std::span<const Vec3> variation) {
  if (variation.size() != curve.size()) {
    throw ConfigError("variation has " + std::to_string(variation.size()) + " samples, curve has " +
                      std::to_string(curve.size()));
  }
  const TangentJets jets = tangent_jets(curve, 1);
  std::vector<double> integrand(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) integrand[i] = variation[i].dot(jets.d1[i]);
  const double boundary = variation.back().dot(jets.T.back()) - variation.front().dot(jets.T.front());
  return boundary - trapezoid(integrand, curve.h);
}

std::vector<Vec3> holonomy_gradient(const CurveSamples& curve, Exec exec) {
  if (curve.dim != 3) throw ConfigError("holonomy gradient is defined for space curves only");
  const TangentJets jets = tangent_jets(curve, 2);
  std::vector<Vec3> g(curve.size());
  for_each_index(exec, curve.size(), [&](std::size_t i) { g[i] = jets.T[i].cross(jets.d2[i]); });
  return g;
}

}  // namespace varistiff
