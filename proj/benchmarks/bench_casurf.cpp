#include "casurf/backlund.hpp"
#include "casurf/curves.hpp"
#include "casurf/families.hpp"
#include "casurf/verify.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace casurf;

namespace {

constexpr double kPi = std::numbers::pi;

Vec e(int k) {
  Vec v = Vec::Zero(3);
  v[k] = 1.0;
  return v;
}

BacklundSolution sine_solution(int n) {
  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  return solve_backlund(C, [](double) { return kPi / 2; }, [](double) { return kPi / 2; },
                        Grid2D::make(n, n, 0.0, 1.0, 0.0, 1.0));
}

}  // namespace

static void BM_IntegrateCurve(benchmark::State& state) {
  const SpaceForm S(1.0);
  const CurvatureSpec kappa = CurvatureSpec::callable([](double s) { return 0.3 + 0.2 * std::sin(s); });
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_curve(S, kappa, e(0), e(1), 2 * kPi, h));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * kPi / h));
}
BENCHMARK(BM_IntegrateCurve)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_GoursatSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sine_solution(n));
}
BENCHMARK(BM_GoursatSolve)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

static void BM_AngleConstancy(benchmark::State& state) {
  const ProductSpace P(1.0, 1.0);
  const int n = static_cast<int>(state.range(0));
  const CurveSample ft = reparameterize_speed(
      integrate_curve(P.M1(), CurvatureSpec::constant(0.4), e(0), e(1), 1.0, 1e-3), std::cos(kPi / 6));
  const CurveSample fb = integrate_curve(P.M2(), CurvatureSpec::constant(0.2), e(0), e(1), 1.0, 1e-3);
  const ImmersionGrid g = family_theta_halfpi(P, kPi / 6, ft, &fb, Grid2D::make(n, n, 0.0, 0.5, 0.0, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(angle_constancy(g));
}
BENCHMARK(BM_AngleConstancy)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_CompatibilityResiduals(benchmark::State& state) {
  const FrameData fd = build_frame_data(exis1_fields(sine_solution(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(compatibility_residuals(fd));
}
BENCHMARK(BM_CompatibilityResiduals)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  const BacklundSolution sol = solve_backlund(C, [](double) { return kPi / 2; }, [](double) { return kPi / 2; },
                                              Grid2D::make(n, n, 0.0, 0.5, 0.0, 0.5));
  const FrameData fd = build_frame_data(exis1_fields(sol));
  const ProductSpace P(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_immersion(fd, P));
}
BENCHMARK(BM_Reconstruct)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
