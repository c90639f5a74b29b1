#pragma once

#include <optional>
#include <span>
#include <vector>

#include "varistiff/common.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

/// A curve sampled on a uniform arc-length grid s_i = s0 + i h.
///
/// Points always live in R^3; planar curves (dim == 2) keep z == 0.
/// Tangents are optional; when absent they are derived from the positions.
struct CurveSamples {
  int dim = 3;
  double s0 = 0.0;
  double h = 0.0;
  std::vector<Vec3> positions;
  std::vector<Vec3> tangents;

  std::size_t size() const noexcept { return positions.size(); }
  bool has_tangents() const noexcept { return !tangents.empty(); }
  double arc_length(std::size_t i) const noexcept { return s0 + static_cast<double>(i) * h; }
  double length() const noexcept { return size() > 1 ? static_cast<double>(size() - 1) * h : 0.0; }
};

/// Checks the arc-length parameterization (|p_{i+1} - p_i| = h within 1e-4
/// relative), unit tangents (1e-8) and planarity for dim == 2.
/// Throws ConfigError naming the first offending sample.
void validate_curve(const CurveSamples& curve);

/// Unit tangent T and its arc-length derivatives up to third order.
struct TangentJets {
  std::vector<Vec3> T;
  std::vector<Vec3> d1;
  std::vector<Vec3> d2;
  std::vector<Vec3> d3;
};

/// Uses the stored tangents when present, otherwise the normalized first
/// derivative of the positions; higher derivatives are finite differences of T.
TangentJets tangent_jets(const CurveSamples& curve, int max_order);

/// d^order gamma / ds^order at every sample.
std::vector<Vec3> derive(const CurveSamples& curve, int order);

/// Parallel normal frame and curvature function along a curve, T' = -N kappa.
///
/// For dim == 3, n2 = T x n1 so that det(T, n1, n2) = 1. For dim == 2 the
/// single normal is n1 = -J T (J the counter-clockwise quarter turn), which
/// makes kappa[0] the usual signed curvature, T' = kappa J T.
struct FrameField {
  int dim = 3;
  std::vector<Vec3> n1;
  std::vector<Vec3> n2;
  std::vector<Vec2> kappa;

  std::size_t size() const noexcept { return n1.size(); }
};

/// Discrete parallel transport of a normal vector: each step applies the
/// minimal rotation taking T_i to T_{i+1}. Every step is an isometry, so unit
/// length, orthogonality to T and angles between transported fields are kept.
std::vector<Vec3> parallel_transport(std::span<const Vec3> tangents, const Vec3& start);

/// Default seed: the coordinate axis least aligned with T(s0), lowest index on
/// ties, orthogonalized against T(s0).
Vec3 default_seed_normal(const Vec3& tangent);

FrameField parallel_frame(const CurveSamples& curve, std::optional<Vec3> seed_normal = std::nullopt);

/// Pair of unit normals at the two ends used to measure holonomy.
struct HolonomyFrame {
  Vec3 wa;
  Vec3 wb;
};

/// Angle in (-pi, pi] with Z_b = cos(t) W_b + sin(t) T(b) x W_b, where Z_b is
/// the parallel transport of W_a.
double holonomy(const CurveSamples& curve, const HolonomyFrame& frame);

/// Tangents used by the curve operations at the first and last sample.
std::pair<Vec3, Vec3> endpoint_tangents(const CurveSamples& curve);

/// 1/2 integral of rho |T'|^2 by the trapezoid rule.
double bending_energy(const CurveSamples& curve, const StiffnessProfile& profile);

/// First variation of length: <v, T>|_a^b - integral <v, T'>.
double length_variation(const CurveSamples& curve, std::span<const Vec3> variation);

/// Holonomy gradient field T x T''. Integrated against a compactly supported
/// variation it gives the first variation of the holonomy.
std::vector<Vec3> holonomy_gradient(const CurveSamples& curve, Exec exec = kDefaultExec);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace varistiff
