#include <benchmark/benchmark.h>

#include <random>

#include "cdmkit/lqr.hpp"
#include "cdmkit/plant.hpp"
#include "cdmkit/polynomial.hpp"
#include "cdmkit/sim.hpp"
#include "cdmkit/squared.hpp"
#include "cdmkit/stability.hpp"
#include "cdmkit/synthesis.hpp"

namespace {

using namespace cdmkit;

void BM_Roots(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  std::vector<double> gamma(static_cast<std::size_t>(degree - 1), 2.0);
  gamma[0] = 2.5;
  const Polynomial p = synth_target(degree, 1.0, gamma);
  for (auto _ : state) benchmark::DoNotOptimize(roots(p));
}
BENCHMARK(BM_Roots)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_SquareRoot(benchmark::State& state) {
  const SquaredPolynomial pp = square_poly(synth_target(6, 1.5, {2.5, 2, 2, 2, 2}, 8779.149));
  for (auto _ : state) benchmark::DoNotOptimize(square_root_poly(pp));
}
BENCHMARK(BM_SquareRoot);

void BM_SolveCare(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A(n, n), B(n, 1);
  for (int i = 0; i < n; ++i) {
    B(i, 0) = u(rng);
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  }
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_care(A, B, Q, R));
}
BENCHMARK(BM_SolveCare)->Arg(2)->Arg(6)->Arg(12)->Arg(24);

void BM_HoverDesign(benchmark::State& state) {
  const Polynomial den = corpus_load("longitudinal_hover").den;
  const Polynomial target = synth_target(6, 1.5, {2.5, 2, 2, 2, 2}, 8779.149);
  CareOptions opts;
  opts.allow_indefinite_q = true;
  for (auto _ : state) {
    const HoverDesign h = hover_design(den, 1.0, 1, target);
    benchmark::DoNotOptimize(solve_care(h.system.A, h.system.B, h.Q, h.R, opts));
  }
}
BENCHMARK(BM_HoverDesign);

void BM_SpeedLoopStep(benchmark::State& state) {
  const PlantTF plant = corpus_load("longitudinal_speed");
  const GainStructure s = speed_control_structure();
  const Polynomial target{1211.08, 13168.72, 7901.235, 2370.37, 355.5556, 26.6667, 1};
  const ControllerABF c = make_controller(s, solve_gains(build_gain_system(s, plant, target)).gains, plant);
  const StateSpace sys = closed_loop_system(c, plant, "u");
  const std::vector<SignalSpec> step{{SignalKind::step, 1.0, 0.0, 0.0, "u", Injection::reference}};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(sys, step, 100.0, 0.01));
}
BENCHMARK(BM_SpeedLoopStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
