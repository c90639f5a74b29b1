// Serial vs OpenMP timings for the per-sample kernels and the closure Jacobian.
// Arg 0 selects Exec::Serial, 1 selects Exec::Parallel.

#include <benchmark/benchmark.h>

#include <Eigen/Geometry>

#include "varistiff/characterizations.hpp"
#include "varistiff/closure.hpp"
#include "varistiff/dynamics.hpp"
#include "varistiff/ode.hpp"

namespace {

using namespace varistiff;

const StiffnessProfile kProfile = StiffnessProfile::sinusoidal(1.0, 1.5, 0.0);
const Vec3 kA(0.3, -0.7, 0.5);
const Vec3 kB(0.2, 0.4, -0.6);

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

const CurveSamples& sample_curve() {
  static const CurveSamples curve = [] {
    const Trajectory t = integrate(Cond5System{kA, kB, kProfile}, cond5_state(Vec3::Zero(), Vec3(0.0, 0.6, 0.8)), 0.0,
                                   20.0, 20000);
    return *t.curve;
  }();
  return curve;
}

void BM_gB_field(benchmark::State& state) {
  const CurveSamples& c = sample_curve();
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(gB_field(c, kProfile, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.size()));
}

void BM_holonomy_elastic_fields(benchmark::State& state) {
  const CurveSamples& c = sample_curve();
  const Exec exec = exec_of(state);
  const double mu = recover_mu(c, kA, kB).mu;
  for (auto _ : state) benchmark::DoNotOptimize(holonomy_elastic_fields(c, kProfile, kA, kB, mu, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.size()));
}

void BM_killing_fit(benchmark::State& state) {
  const CurveSamples& c = sample_curve();
  const Exec exec = exec_of(state);
  std::vector<Vec3> vel(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) vel[i] = kA.cross(c.positions[i]) + kB;
  for (auto _ : state) benchmark::DoNotOptimize(killing_fit(c, vel, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.size()));
}

void BM_fd_jacobian(benchmark::State& state) {
  ClosureProblem p;
  p.profile = kProfile;
  p.a = kA;
  p.b = kB;
  p.length = 19.0;
  p.steps = 4000;
  for (int k : {kA1, kA2, kA3, kB1, kB2, kB3, kLength, kShift}) p.free[k] = true;
  const Theta theta = p.initial_theta();
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fd_jacobian(p, theta, exec));
}

}  // namespace

BENCHMARK(BM_gB_field)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_holonomy_elastic_fields)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_killing_fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fd_jacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
