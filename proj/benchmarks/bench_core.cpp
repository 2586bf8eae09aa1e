#include <benchmark/benchmark.h>

#include <vector>

#include "helpers.hpp"
#include "sps/analytic.hpp"
#include "sps/simulation.hpp"

using namespace sps;

namespace {

const Model& plant() {
  static const Model m = test::default_model();
  return m;
}

const SystemState& equilibrium() {
  static const SystemState eq = find_equilibrium(plant(), 0.5);
  return eq;
}

void BM_StateDerivative(benchmark::State& state) {
  const Model& m = plant();
  const SystemState& eq = equilibrium();
  for (auto _ : state) {
    benchmark::DoNotOptimize(state_derivative(eq, m, {}, 0.0));
  }
}
BENCHMARK(BM_StateDerivative);

void BM_SimulateOneSecond(benchmark::State& state) {
  const Model& m = plant();
  const SystemState& eq = equilibrium();
  IntegratorConfig ic;
  ic.dt = 1e-4;
  ic.t_end = 1.0;
  ic.record_every = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(eq, m, {}, {}, ic));
  }
}
BENCHMARK(BM_SimulateOneSecond)->Unit(benchmark::kMillisecond);

void BM_ElectricalPower(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  NetworkModel net;
  net.n = n;
  net.g = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(n), 0.1);
  net.b = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(n), -1.0);
  net.v_mag = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  std::vector<double> theta(n, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(electrical_power(theta, net));
  }
}
BENCHMARK(BM_ElectricalPower)->Arg(2)->Arg(8)->Arg(32);

void BM_ClosedFormExactKernels(benchmark::State& state) {
  GeneratorParams gen;
  GovernorAttackCoeffs a;
  a.alpha1 = -0.2;
  a.gamma1 = 0.01;
  a.beta1 = TimeVaryingTerm::sinusoid(0.01, 0.5);
  a.beta2 = TimeVaryingTerm::ramp(0.001);
  const auto lc = lambda_coefficients(gen, a);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(delta_omega_closed_form(lc, 0.0, 0.02, t));
  }
}
BENCHMARK(BM_ClosedFormExactKernels);

void BM_ClosedFormQuadrature(benchmark::State& state) {
  GeneratorParams gen;
  GovernorAttackCoeffs a;
  a.alpha2 = 0.1;
  a.beta1 = TimeVaryingTerm::sinusoid(0.01, 0.5);
  const auto lc = lambda_coefficients(
      gen, a, [](double t) { return 0.6 + 0.1 * std::sin(t); });
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(delta_omega_closed_form(lc, 0.0, 0.02, t));
  }
}
BENCHMARK(BM_ClosedFormQuadrature);

void BM_FindEquilibrium(benchmark::State& state) {
  const Model& m = plant();
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_equilibrium(m, 0.5));
  }
}
BENCHMARK(BM_FindEquilibrium)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
