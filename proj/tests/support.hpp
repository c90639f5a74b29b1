#pragma once

// Curve builders, random problem generators and independent oracles shared by
// the unit tests and the acceptance runner.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "varistiff/curve.hpp"
#include "varistiff/stiffness.hpp"

namespace testing_support {

using varistiff::CurveSamples;
using varistiff::StiffnessProfile;
using varistiff::Vec3;

constexpr double kPi = std::numbers::pi;

inline CurveSamples sample_curve(int dim, double s0, double length, std::size_t intervals,
                                 const std::function<Vec3(double)>& position,
                                 const std::function<Vec3(double)>& tangent) {
  CurveSamples c;
  c.dim = dim;
  c.s0 = s0;
  c.h = length / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double s = c.arc_length(i);
    c.positions.push_back(position(s));
    if (tangent) c.tangents.push_back(tangent(s));
  }
  return c;
}

/// Counter-clockwise circle of radius r about the origin starting at (r, 0).
inline CurveSamples circle(double r, std::size_t intervals, double turns = 1.0, int dim = 3, bool tangents = true) {
  const double len = 2.0 * kPi * r * turns;
  return sample_curve(
      dim, 0.0, len, intervals, [r](double s) { return Vec3(r * std::cos(s / r), r * std::sin(s / r), 0.0); },
      tangents ? std::function<Vec3(double)>([r](double s) { return Vec3(-std::sin(s / r), std::cos(s / r), 0.0); })
               : std::function<Vec3(double)>());
}

inline CurveSamples line(const Vec3& start, const Vec3& dir, double length, std::size_t intervals, int dim = 3) {
  const Vec3 d = dir.normalized();
  return sample_curve(
      dim, 0.0, length, intervals, [=](double s) { return Vec3(start + s * d); }, [=](double) { return d; });
}

/// Arc-length helix of radius r and pitch parameter p (height p per radian).
inline CurveSamples helix(double r, double p, std::size_t intervals, double periods = 1.0) {
  const double c = std::sqrt(r * r + p * p);
  return sample_curve(
      3, 0.0, 2.0 * kPi * c * periods, intervals,
      [=](double s) { return Vec3(r * std::cos(s / c), r * std::sin(s / c), p * s / c); },
      [=](double s) { return Vec3(-r / c * std::sin(s / c), r / c * std::cos(s / c), p / c); });
}

inline Vec3 helix_inward_normal(double r, double p, double s) {
  const double c = std::sqrt(r * r + p * p);
  return Vec3(-std::cos(s / c), -std::sin(s / c), 0.0);
}

/// Trigonometric polynomial c0 + sum_k (C_k cos(k w u) + S_k sin(k w u)) and its derivatives.
struct TrigPoly {
  double c0 = 0.0;
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;
  double w = 1.0;

  double d(double u, int order) const {
    double v = order == 0 ? c0 : 0.0;
    for (std::size_t k = 0; k < cos_coef.size(); ++k) {
      const double f = w * static_cast<double>(k + 1);
      const double x = f * u;
      const double fp = std::pow(f, order);
      // derivative cycle of cos: cos, -sin, -cos, sin
      double cpart = 0.0;
      double spart = 0.0;
      switch (order % 4) {
        case 0:
          cpart = std::cos(x);
          spart = std::sin(x);
          break;
        case 1:
          cpart = -std::sin(x);
          spart = std::cos(x);
          break;
        case 2:
          cpart = -std::cos(x);
          spart = -std::sin(x);
          break;
        case 3:
          cpart = std::sin(x);
          spart = -std::cos(x);
          break;
      }
      v += fp * (cos_coef[k] * cpart + sin_coef[k] * spart);
    }
    return v;
  }
};

/// Space curve with exactly unit tangent T = (cos phi cos psi, sin phi cos psi, sin psi).
struct AnalyticCurve {
  TrigPoly phi;
  TrigPoly psi;
  double length = 4.0;

  Vec3 tangent(double u) const {
    const double a = phi.d(u, 0);
    const double b = psi.d(u, 0);
    return Vec3(std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b));
  }

  Vec3 tangent_d1(double u) const {
    const double a = phi.d(u, 0);
    const double b = psi.d(u, 0);
    const double da = phi.d(u, 1);
    const double db = psi.d(u, 1);
    const Vec3 t_phi(-std::sin(a) * std::cos(b), std::cos(a) * std::cos(b), 0.0);
    const Vec3 t_psi(-std::cos(a) * std::sin(b), -std::sin(a) * std::sin(b), std::cos(b));
    return da * t_phi + db * t_psi;
  }

  /// Positions by composite Simpson quadrature of T on `intervals` cells, each
  /// subdivided `refine` times.
  CurveSamples sample(std::size_t intervals, std::size_t refine = 8) const {
    CurveSamples c;
    c.dim = 3;
    c.s0 = 0.0;
    c.h = length / static_cast<double>(intervals);
    Vec3 p = Vec3::Zero();
    c.positions.push_back(p);
    c.tangents.push_back(tangent(0.0));
    const double sub = c.h / static_cast<double>(refine);
    for (std::size_t i = 0; i < intervals; ++i) {
      const double u0 = c.arc_length(i);
      for (std::size_t k = 0; k < refine; ++k) {
        const double a = u0 + static_cast<double>(k) * sub;
        p += sub / 6.0 * (tangent(a) + 4.0 * tangent(a + 0.5 * sub) + tangent(a + sub));
      }
      c.positions.push_back(p);
      c.tangents.push_back(tangent(c.arc_length(i + 1)));
    }
    return c;
  }
};

inline TrigPoly random_trig(std::mt19937_64& rng, int terms, double amplitude, double w) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  TrigPoly t;
  t.c0 = u(rng);
  t.w = w;
  for (int k = 0; k < terms; ++k) {
    const double damp = 1.0 / static_cast<double>(k + 1);
    t.cos_coef.push_back(damp * u(rng));
    t.sin_coef.push_back(damp * u(rng));
  }
  return t;
}

inline AnalyticCurve random_curve(std::mt19937_64& rng, double length = 4.0) {
  AnalyticCurve c;
  c.length = length;
  c.phi = random_trig(rng, 3, 1.2, 2.0 * kPi / length);
  c.psi = random_trig(rng, 3, 0.6, 2.0 * kPi / length);
  return c;
}

inline StiffnessProfile random_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return StiffnessProfile::constant(0.5 + 2.0 * u(rng));
    case 1:
      return StiffnessProfile::sinusoidal(0.2 + 0.8 * u(rng), 1.2 + u(rng), 6.0 * u(rng), 0.5 + u(rng));
    case 2:
      return StiffnessProfile::gaussian_bump(0.2 + u(rng), 0.5 + u(rng), 0.3 + u(rng), 4.0 * u(rng));
    default:
      return StiffnessProfile::sum({StiffnessProfile::sinusoidal(0.3 * u(rng), 1.0 + u(rng), 6.0 * u(rng)),
                                    StiffnessProfile::gaussian_bump(0.5 * u(rng), 0.2, 0.5 + u(rng), 4.0 * u(rng))});
  }
}

/// Compactly supported C^3 variation b(u) (V + W sin(nu u)) with
/// b = (1 - x^2)^4 on |x| < 1, x = (u - m) / w.
struct BumpVariation {
  double m = 2.0;
  double w = 1.0;
  Vec3 V = Vec3::Zero();
  Vec3 W = Vec3::Zero();
  double nu = 1.0;

  double bump(double u, int order) const {
    const double x = (u - m) / w;
    if (std::abs(x) >= 1.0) return 0.0;
    const double q = 1.0 - x * x;
    double v = 0.0;
    switch (order) {
      case 0:
        v = std::pow(q, 4);
        break;
      case 1:
        v = -8.0 * x * std::pow(q, 3);
        break;
      case 2:
        v = -8.0 * std::pow(q, 3) + 48.0 * x * x * q * q;
        break;
    }
    return v / std::pow(w, order);
  }

  Vec3 eval(double u, int order) const {
    const double sn = std::sin(nu * u);
    const double cs = std::cos(nu * u);
    const Vec3 f0 = V + W * sn;
    const Vec3 f1 = W * (nu * cs);
    const Vec3 f2 = W * (-nu * nu * sn);
    switch (order) {
      case 0:
        return bump(u, 0) * f0;
      case 1:
        return bump(u, 1) * f0 + bump(u, 0) * f1;
      default:
        return bump(u, 2) * f0 + 2.0 * bump(u, 1) * f1 + bump(u, 0) * f2;
    }
  }

  std::vector<Vec3> sample(const CurveSamples& c) const {
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back(eval(c.arc_length(i), 0));
    return out;
  }
};

inline BumpVariation random_variation(std::mt19937_64& rng, double length) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BumpVariation b;
  b.w = length * (0.1 + 0.075 * (u(rng) + 1.0));
  b.m = length * 0.5 + 0.2 * length * u(rng);
  b.V = Vec3(u(rng), u(rng), u(rng));
  b.W = 0.5 * Vec3(u(rng), u(rng), u(rng));
  b.nu = 2.0 + u(rng);
  return b;
}

/// Composite Simpson rule over [a, b] with an even number of cells.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t cells) {
  if (cells % 2) ++cells;
  const double h = (b - a) / static_cast<double>(cells);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < cells; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  return acc * h / 3.0;
}

/// Bending energy of gamma + t v for an analytic arc-length curve, with rho
/// attached to the original parameter u.
inline double perturbed_energy(const AnalyticCurve& c, const StiffnessProfile& rho, const BumpVariation& v, double t,
                               std::size_t cells = 40000) {
  return simpson(
      [&](double u) {
        const Vec3 d1 = c.tangent(u) + t * v.eval(u, 1);
        const Vec3 d2 = c.tangent_d1(u) + t * v.eval(u, 2);
        const double speed = d1.norm();
        return 0.5 * rho.jet(u).value * d1.cross(d2).squaredNorm() / std::pow(speed, 5);
      },
      0.0, c.length, cells);
}

inline double perturbed_length(const AnalyticCurve& c, const BumpVariation& v, double t, std::size_t cells = 40000) {
  return simpson([&](double u) { return (c.tangent(u) + t * v.eval(u, 1)).norm(); }, 0.0, c.length, cells);
}

/// Holonomy of gamma + t v between W_a and W_b by RK4 integration of the
/// parallel transport equation Z' = -<Z, dT/du> T on the perturbed curve.
inline double perturbed_holonomy(const AnalyticCurve& c, const BumpVariation& v, double t, const Vec3& wa,
                                 const Vec3& wb, std::size_t steps = 40000) {
  auto frame = [&](double u, Vec3& tan, Vec3& dtan) {
    const Vec3 d1 = c.tangent(u) + t * v.eval(u, 1);
    const Vec3 d2 = c.tangent_d1(u) + t * v.eval(u, 2);
    const double n = d1.norm();
    tan = d1 / n;
    dtan = (d2 - tan.dot(d2) * tan) / n;
  };
  auto rhs = [&](double u, const Vec3& z) {
    Vec3 tan;
    Vec3 dtan;
    frame(u, tan, dtan);
    return Vec3(-z.dot(dtan) * tan);
  };
  const double h = c.length / static_cast<double>(steps);
  Vec3 z = wa;
  for (std::size_t i = 0; i < steps; ++i) {
    const double u = static_cast<double>(i) * h;
    const Vec3 k1 = rhs(u, z);
    const Vec3 k2 = rhs(u + 0.5 * h, z + 0.5 * h * k1);
    const Vec3 k3 = rhs(u + 0.5 * h, z + 0.5 * h * k2);
    const Vec3 k4 = rhs(u + h, z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Vec3 tb;
  Vec3 dtb;
  frame(c.length, tb, dtb);
  return std::atan2(z.dot(tb.cross(wb)), z.dot(wb));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

inline Vec3 random_box(std::mt19937_64& rng, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace testing_support
