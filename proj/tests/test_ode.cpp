#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "varistiff/ode.hpp"

using namespace varistiff;
using namespace testing_support;

namespace {

double max_drift(const Trajectory& t) { return t.max_tangent_drift; }

double mu_spread(const CurveSamples& c, const Vec3& a, const Vec3& b) {
  const double mu0 = (a.cross(c.positions[0]) + b).dot(c.tangents[0]);
  double spread = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    spread = std::max(spread, std::abs((a.cross(c.positions[i]) + b).dot(c.tangents[i]) - mu0));
  }
  return spread;
}

}  // namespace

TEST_CASE("single steps") {
  State eq(2);
  eq << 0.0, 0.0;
  const State out = rk4_step(PlanarThetaSystem{}, eq, 0.0, 0.1);
  CHECK(out == eq);

  Cond5System circle_sys{Vec3::Zero(), Vec3::UnitZ(), StiffnessProfile::constant(1.0)};
  const State s1 = rk4_step(circle_sys, cond5_state(Vec3::Zero(), Vec3::UnitX()), 0.0, 1e-3);
  CHECK(std::abs(s1.segment<3>(3).norm() - 1.0) < 1e-12);

  CustomSystem expo{1, [](double, const State& y) { return State(y); }};
  State y0(1);
  y0 << 1.0;
  CHECK(std::abs(rk4_step(expo, y0, 0.0, 0.1)[0] - std::exp(0.1)) < 1e-7);
}

TEST_CASE("non-finite results are numerical errors") {
  CustomSystem blow{1, [](double, const State& y) { return State(y.array().square()); }};
  State y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(integrate(blow, y0, 0.0, 10.0, 100), NumericalError);
  CHECK_THROWS_AS(integrate(blow, y0, 0.0, 1.0, 1), ConfigError);
}

TEST_CASE("circle oracle") {
  Cond5System sys{Vec3::Zero(), Vec3::UnitZ(), StiffnessProfile::constant(1.0)};
  const Trajectory t = integrate(sys, cond5_state(Vec3::Zero(), Vec3::UnitX()), 0.0, 2 * kPi, 1000);
  REQUIRE(t.curve);
  const CurveSamples& c = *t.curve;
  CHECK((c.positions.back() - c.positions.front()).norm() <= 1e-6);
  CHECK(max_drift(t) <= 5e-8);
  // Center of the circle: gamma'' = b x T points to (0, 1, 0).
  CHECK((c.positions[250] - Vec3(1, 1, 0)).norm() < 1e-6);
}

TEST_CASE("Richardson ratio on the circle") {
  Cond5System sys{Vec3::Zero(), Vec3::UnitZ(), StiffnessProfile::constant(1.0)};
  auto gap = [&](std::size_t n) {
    const Trajectory t = integrate(sys, cond5_state(Vec3::Zero(), Vec3::UnitX()), 0.0, 2 * kPi, n);
    return (t.curve->positions.back() - t.curve->positions.front()).norm();
  };
  const double ratio = gap(100) / gap(200);
  CHECK(ratio > 16.0 * 0.7);
  CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("tilted start gives a helix") {
  Cond5System sys{Vec3::Zero(), Vec3::UnitZ(), StiffnessProfile::constant(1.0)};
  const Vec3 t0 = Vec3(1, 0, 1).normalized();
  const Trajectory t = integrate(sys, cond5_state(Vec3::Zero(), t0), 0.0, 10.0, 10000);
  const CurveSamples& c = *t.curve;
  // T rotates about e3 at unit rate: T(s) = (cos s, sin s, 1) / sqrt 2, so the
  // curve is a helix of radius 1/sqrt 2 and climb 1/sqrt 2 per unit length.
  const double k = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < c.size(); i += 500) {
    const double s = c.arc_length(i);
    const Vec3 expect(k * std::sin(s), k * (1.0 - std::cos(s)), k * s);
    CHECK((c.positions[i] - expect).norm() < 1e-8);
  }
}

TEST_CASE("Cond5 conserves |T| and mu") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    Cond5System sys{random_box(rng, 1.0), random_box(rng, 1.0), StiffnessProfile::sinusoidal(1.0, 1.5, 0.0)};
    const Trajectory t = integrate(sys, cond5_state(Vec3::Zero(), random_unit(rng)), 0.0, 10.0, 10000);
    CHECK(max_drift(t) <= 5e-8);
    CHECK(mu_spread(*t.curve, sys.a, sys.b) <= 1e-7);
  }
}

TEST_CASE("drift limit aborts and renormalize keeps unit tangents") {
  Cond5System sys{Vec3(0.9, -0.4, 0.7), Vec3(0.2, 0.5, -0.8), StiffnessProfile::sinusoidal(1.0, 1.5, 0.0)};
  const State init = cond5_state(Vec3::Zero(), Vec3::UnitX());
  CHECK_THROWS_AS(integrate(sys, init, 0.0, 20.0, 60, {false, 1e-6}), NumericalError);
  const Trajectory t = integrate(sys, init, 0.0, 20.0, 2000, {true, 1e-3});
  for (const Vec3& tan : t.curve->tangents) CHECK(std::abs(tan.norm() - 1.0) < 1e-14);
  CHECK_THROWS_AS(cond5_state(Vec3::Zero(), Vec3(1, 1, 0)), ConfigError);
}

TEST_CASE("pendulum form reproduces Cond5 curves with mu = 0") {
  // With <b, T0> = 0 the conserved mu vanishes and the Cond5 curve is elastic
  // with the opposite constant in the pendulum form.
  const auto rho = StiffnessProfile::sinusoidal(0.5, 1.5, 0.3);
  const Vec3 b(0.3, 0.1, 1.0);
  Cond5System c5{Vec3(0.2, -0.4, 0.3), b, rho};
  const Vec3 t0 = b.cross(Vec3::UnitX()).normalized();
  const Trajectory a = integrate(c5, cond5_state(Vec3::Zero(), t0), 0.0, 5.0, 5000);
  const Vec3 dt0 = b.cross(t0) / rho.jet(0.0).value;
  PendulumSystem ps{3, -c5.a, rho};
  const Trajectory p = integrate(ps, pendulum_state(Vec3::Zero(), t0, dt0), 0.0, 5.0, 5000);
  CHECK((a.curve->positions.back() - p.curve->positions.back()).norm() < 1e-8);
}

TEST_CASE("planar theta system") {
  SUBCASE("energy conservation") {
    PlanarThetaSystem sys{constant_field(1.0), constant_field(2.0)};
    State y0(2);
    y0 << 1.2, 0.3;
    const Trajectory t = integrate(sys, y0, 0.0, 10.0, 10000);
    auto energy = [](const State& y) { return 0.5 * 2.0 * y[1] * y[1] - std::cos(y[0]); };
    double worst = 0.0;
    for (const State& y : t.states) worst = std::max(worst, std::abs(energy(y) - energy(y0)));
    CHECK(worst <= 1e-7);
  }
  SUBCASE("small-angle period") {
    State y0(2);
    y0 << 0.01, 0.0;
    const Trajectory t = integrate(PlanarThetaSystem{}, y0, 0.0, 10.0, 10000);
    // Spacing of consecutive upward zero crossings of theta'.
    std::vector<double> up;
    for (std::size_t i = 1; i < t.states.size(); ++i) {
      const double p = t.states[i - 1][1];
      const double q = t.states[i][1];
      if (p < 0.0 && q >= 0.0) up.push_back(t.h * (static_cast<double>(i - 1) + p / (p - q)));
    }
    REQUIRE(up.size() >= 2);
    const double period = up[1] - up[0];
    CHECK(std::abs(period - 2 * kPi) <= 1e-3 * 2 * kPi);
  }
  SUBCASE("reconstruction") {
    const std::vector<double> zero(101, 0.0);
    const CurveSamples v = reconstruct_planar_curve(zero, 0.01);
    CHECK(v.dim == 2);
    CHECK((v.positions.back() - Vec3(0, -1, 0)).norm() < 1e-14);
    std::vector<double> theta(1001);
    const double h = 2 * kPi / 1000;
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = h * static_cast<double>(i);
    const CurveSamples c = reconstruct_planar_curve(theta, h);
    // T = (sin s, -cos s): gamma = (1 - cos s, -sin s), centred at (1, 0).
    for (const Vec3& p : c.positions) CHECK(std::abs((p - Vec3(1, 0, 0)).norm() - 1.0) < 1e-6);
    CHECK((c.positions.back() - c.positions.front()).norm() < 1e-6);
  }
}

TEST_CASE("variable pendulum with constant length") {
  VariablePendulumSystem vp{1.0, constant_field(1.0)};
  PlanarThetaSystem pt{constant_field(1.0), constant_field(1.0)};
  State y0(2);
  y0 << 0.8, 0.0;
  const Trajectory a = integrate(vp, y0, 0.0, 10.0, 1000);
  const Trajectory b = integrate(pt, y0, 0.0, 10.0, 1000);
  for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(std::abs(a.states[i][0] - b.states[i][0]) <= 1e-9);
}

TEST_CASE("default steps and dimensions") {
  CHECK(default_steps(0.5) == 1000);
  CHECK(default_steps(20.0) == 20000);
  CHECK(state_dimension(Cond5System{}) == 6);
  CHECK(state_dimension(PendulumSystem{}) == 9);
  CHECK(state_dimension(PlanarThetaSystem{}) == 2);
}
