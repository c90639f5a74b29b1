#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/finite_difference.hpp"

using namespace varistiff;
using namespace testing_support;

namespace {

void check_frame_invariants(const CurveSamples& c, const FrameField& f) {
  const TangentJets j = tangent_jets(c, 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& t = j.T[i];
    CHECK(std::abs(f.n1[i].norm() - 1.0) < 1e-8);
    CHECK(std::abs(f.n1[i].dot(t)) < 1e-8);
    if (f.dim == 3) {
      CHECK(std::abs(f.n2[i].dot(f.n1[i])) < 1e-8);
      Mat3 m;
      m << t, f.n1[i], f.n2[i];
      CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-8));
      // kappa reproduces the normal part of the discrete T'; its tangential
      // part is finite-difference error only.
      const Vec3 rebuilt = -(f.kappa[i].x() * f.n1[i] + f.kappa[i].y() * f.n2[i]);
      const Vec3 normal = j.d1[i] - t.dot(j.d1[i]) * t;
      CHECK((rebuilt - normal).norm() < 1e-10 * std::max(1.0, normal.norm()));
    } else {
      CHECK(f.kappa[i].y() == 0.0);
      const Vec3 normal = j.d1[i] - t.dot(j.d1[i]) * t;
      CHECK((-f.kappa[i].x() * f.n1[i] - normal).norm() < 1e-10 * std::max(1.0, normal.norm()));
    }
  }
}

}  // namespace

TEST_CASE("finite differences on a line and a circle") {
  const CurveSamples l = line(Vec3::Zero(), Vec3::UnitX(), 3.0, 30, 2);
  for (const Vec3& d : derive(l, 1)) CHECK((d - Vec3::UnitX()).norm() < 1e-12);
  for (const Vec3& d : derive(l, 2)) CHECK(d.norm() < 1e-9);

  const CurveSamples c = circle(1.0, 1000, 1.0, 2, false);
  for (const Vec3& d : derive(c, 2)) CHECK(std::abs(d.norm() - 1.0) < 1e-4);

  const CurveSamples hx = helix(2.0, 1.0, 2000);
  for (const Vec3& d : derive(hx, 2)) CHECK(std::abs(d.norm() - 0.4) < 1e-4);
}

TEST_CASE("finite differences are second order") {
  auto err = [](std::size_t n) {
    std::vector<double> f(n + 1);
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) f[i] = std::sin(3.0 * h * static_cast<double>(i));
    double e = 0.0;
    const auto d = finite_difference(f, h, 2);
    for (std::size_t i = 0; i <= n; ++i) e = std::max(e, std::abs(d[i] + 9.0 * f[i]));
    return e;
  };
  const double ratio = err(100) / err(200);
  CHECK(ratio > 3.0);
  CHECK_THROWS_AS(finite_difference(std::vector<double>{1.0, 2.0, 3.0}, 1.0, 2), ConfigError);
}

TEST_CASE("curve validation") {
  CurveSamples c = circle(1.0, 400);
  CHECK_NOTHROW(validate_curve(c));
  c.tangents[7] *= 1.001;
  CHECK_THROWS_AS(validate_curve(c), ConfigError);
  CurveSamples bent = circle(1.0, 400);
  bent.h *= 1.01;
  CHECK_THROWS_AS(validate_curve(bent), ConfigError);
  CurveSamples lifted = circle(1.0, 400, 1.0, 2);
  lifted.positions[3].z() = 1e-3;
  CHECK_THROWS_AS(validate_curve(lifted), ConfigError);
}

TEST_CASE("planar frame gives the signed curvature") {
  const CurveSamples ccw = circle(2.0, 800, 1.0, 2);
  const FrameField f = parallel_frame(ccw);
  CHECK(f.dim == 2);
  check_frame_invariants(ccw, f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.n1[i].z() == 0.0);
    CHECK(f.kappa[i].x() == doctest::Approx(0.5).epsilon(1e-4));
  }
  CurveSamples cw = ccw;
  for (auto& p : cw.positions) p.y() = -p.y();
  for (auto& t : cw.tangents) t.y() = -t.y();
  const FrameField g = parallel_frame(cw);
  CHECK(g.kappa[100].x() == doctest::Approx(-0.5).epsilon(1e-4));
}

TEST_CASE("straight segment keeps a constant normal") {
  const CurveSamples l = line(Vec3(1, 2, 3), Vec3(1, 1, 1), 5.0, 100);
  const FrameField f = parallel_frame(l);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK((f.n1[i] - f.n1[0]).norm() < 1e-14);
    CHECK(f.kappa[i].norm() < 1e-12);
  }
}

TEST_CASE("frame invariants on random curves") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CurveSamples c = random_curve(rng).sample(2000);
    check_frame_invariants(c, parallel_frame(c));
    check_frame_invariants(c, parallel_frame(c, random_unit(rng)));
  }
}

TEST_CASE("transported normals stay unit over many steps") {
  const CurveSamples hx = helix(2.0, 1.0, 10000, 3.0);
  const FrameField f = parallel_frame(hx);
  double worst = 0.0;
  for (const Vec3& n : f.n1) worst = std::max(worst, std::abs(n.norm() - 1.0));
  CHECK(worst < 1e-8);
}

TEST_CASE("circle transport returns to the start") {
  const CurveSamples c = circle(1.0, 2000);
  const FrameField f = parallel_frame(c, Vec3::UnitZ());
  CHECK((f.n1.back() - f.n1.front()).norm() < 1e-6);
  const FrameField g = parallel_frame(c);
  CHECK((g.n1.back() - g.n1.front()).norm() < 1e-6);
}

TEST_CASE("default seed normal") {
  CHECK(default_seed_normal(Vec3::UnitX()).isApprox(Vec3::UnitY()));
  CHECK(default_seed_normal(Vec3::UnitY()).isApprox(Vec3::UnitX()));
  const Vec3 t = Vec3(1, 1, 1).normalized();
  const Vec3 n = default_seed_normal(t);
  CHECK(std::abs(n.dot(t)) < 1e-15);
  CHECK(n.x() > 0.0);
}

TEST_CASE("holonomy of planar curves vanishes") {
  const CurveSamples c = circle(1.5, 1000, 0.7);
  const auto [ta, tb] = endpoint_tangents(c);
  const Vec3 wa = Vec3::UnitZ();
  const Vec3 wb = Vec3::UnitZ();
  CHECK(std::abs(holonomy(c, {wa, wb})) < 1e-6);
  const Vec3 inplane_a = Vec3(0, 0, 1).cross(ta);
  const Vec3 inplane_b = Vec3(0, 0, 1).cross(tb);
  CHECK(std::abs(holonomy(c, {inplane_a, inplane_b})) < 1e-6);
}

TEST_CASE("helix holonomy") {
  const double r = 2.0;
  const double p = 1.0;
  const double c = std::sqrt(r * r + p * p);
  const CurveSamples hx = helix(r, p, 20000);
  const HolonomyFrame inward{helix_inward_normal(r, p, 0.0), helix_inward_normal(r, p, hx.length())};
  // Total torsion of one period is 2 pi p / c; the transported normal turns by
  // minus that angle relative to the principal normal.
  const double total_torsion = 2.0 * kPi * p / c;
  CHECK(std::abs(holonomy(hx, inward) - wrap_angle(-total_torsion)) < 1e-4);

  // Reference frame rotated by phi about T(b).
  const FrameField f = parallel_frame(hx, inward.wa);
  const Vec3 zb = f.n1.back();
  const Vec3 tb = endpoint_tangents(hx).second;
  for (double phi : {0.3, -1.1, 2.5}) {
    const Vec3 wb = Eigen::AngleAxisd(phi, tb) * zb;
    CHECK(std::abs(wrap_angle(holonomy(hx, {inward.wa, wb}) + phi)) < 1e-8);
  }
}

TEST_CASE("holonomy does not depend on the internal seed") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const CurveSamples c = random_curve(rng).sample(2000);
    const auto [ta, tb] = endpoint_tangents(c);
    const Vec3 wa = default_seed_normal(ta);
    const Vec3 wb = default_seed_normal(tb);
    const double h1 = holonomy(c, {wa, wb});
    const Vec3 wa2 = ta.cross(wa);
    const Vec3 wb2 = tb.cross(wb);
    CHECK(std::abs(wrap_angle(holonomy(c, {wa2, wb2}) - h1)) < 1e-8);
  }
}

TEST_CASE("bending energy") {
  const CurveSamples c = circle(1.0, 2000);
  CHECK(bending_energy(c, StiffnessProfile::constant(1.0)) == doctest::Approx(kPi).epsilon(1e-4));
  CHECK(bending_energy(c, StiffnessProfile::constant(2.0)) == doctest::Approx(2 * kPi).epsilon(1e-4));
  CHECK(bending_energy(line(Vec3::Zero(), Vec3::UnitY(), 2.0, 50), StiffnessProfile::sinusoidal(1, 1.5, 0)) == 0.0);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const CurveSamples g = random_curve(rng).sample(1000);
    const auto r1 = random_profile(rng);
    const auto r2 = random_profile(rng);
    const double sum = bending_energy(g, StiffnessProfile::sum({r1, r2}));
    const double sep = bending_energy(g, r1) + bending_energy(g, r2);
    CHECK(std::abs(sum - sep) <= 1e-12 * std::abs(sep));
  }
}

TEST_CASE("length variation") {
  const CurveSamples c = circle(1.0, 2000, 1.0, 3, false);
  const std::vector<Vec3> shift(c.size(), Vec3(0.3, -1.2, 0.7));
  CHECK(std::abs(length_variation(c, shift)) < 1e-8);

  // Radial variation: the length of (1 + t) gamma grows at rate 2 pi.
  const std::vector<Vec3> radial(c.positions.begin(), c.positions.end());
  CHECK(length_variation(c, radial) == doctest::Approx(2 * kPi).epsilon(1e-4));
}

TEST_CASE("length variation matches the finite-difference oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const AnalyticCurve ac = random_curve(rng);
    const BumpVariation v = random_variation(rng, ac.length);
    const CurveSamples c = ac.sample(8000);
    const double quad = length_variation(c, v.sample(c));
    const double eps = 1e-5;
    const double fd = (perturbed_length(ac, v, eps) - perturbed_length(ac, v, -eps)) / (2 * eps);
    CHECK(std::abs(quad - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
  }
}

TEST_CASE("holonomy gradient") {
  const CurveSamples c = circle(1.0, 500);
  for (const Vec3& g : holonomy_gradient(c)) {
    CHECK(std::abs(g.x()) < 1e-12);
    CHECK(std::abs(g.y()) < 1e-12);
  }
  for (const Vec3& g : holonomy_gradient(line(Vec3::Zero(), Vec3(1, 2, 0), 3.0, 60))) CHECK(g.norm() < 1e-9);

  const CurveSamples hx = helix(2.0, 1.0, 3000);
  CHECK(holonomy_gradient(hx, Exec::Serial) == holonomy_gradient(hx, Exec::Parallel));
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
}
