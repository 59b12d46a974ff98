#include <scatterfm/inversion.hpp>
#include <scatterfm/parallel.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace sfm;

const WaveContext kCtx = WaveContext::from_wavenumber(5.0);

void BM_AssembleV_Kite(benchmark::State& state) {
  const auto mesh = discretize_curve({Kite{}}, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_boundary_operator(mesh, kCtx, OperatorKind::V));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleV_Kite)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AssembleT_Kite(benchmark::State& state) {
  const auto mesh = discretize_curve({Kite{}}, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_boundary_operator(mesh, kCtx, OperatorKind::T));
}
BENCHMARK(BM_AssembleT_Kite)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_AssembleV_Crack(benchmark::State& state) {
  const auto mesh = discretize_curve({Segment{}}, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_boundary_operator(mesh, kCtx, OperatorKind::V));
}
BENCHMARK(BM_AssembleV_Crack)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_FarField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mesh = discretize_curve({Kite{}}, n);
  const DirectionGrid dirs(64);
  const BoundaryConditionSpec bc = state.range(1) == 0 ? BoundaryConditionSpec{DirichletBC{}}
                                                       : BoundaryConditionSpec{robin_split(-1.0, n)};
  for (auto _ : state) benchmark::DoNotOptimize(far_field_operator(mesh, kCtx, bc, dirs));
}
BENCHMARK(BM_FarField)->ArgsProduct({{128, 256, 512}, {0, 1}})->ArgNames({"n", "local_b"})->Unit(benchmark::kMillisecond);

void BM_SpectralDecompose(benchmark::State& state) {
  const DirectionGrid dirs(static_cast<int>(state.range(0)));
  const auto F = disk_dirichlet_oracle(1.0, kCtx, dirs);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(F));
}
BENCHMARK(BM_SpectralDecompose)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_PicardScan(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const DirectionGrid dirs(64);
  const auto dec = spectral_decompose(disk_dirichlet_oracle(1.0, kCtx, dirs));
  const SamplingGrid grid({-2, 2, -2, 2}, 41, 41);
  for (auto _ : state) benchmark::DoNotOptimize(scan_grid(dec, grid, kCtx, dirs, 1e-8));
  state.SetItemsProcessed(state.iterations() * grid.size());
  set_worker_count(1);
}
BENCHMARK(BM_PicardScan)->Arg(1)->Arg(4)->ArgName("workers")->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_InfScan(benchmark::State& state) {
  const DirectionGrid dirs(64);
  const auto F = disk_dirichlet_oracle(1.0, kCtx, dirs);
  const InfCriterion crit(F.F, 32);
  const SamplingGrid grid({-2, 2, -2, 2}, 41, 41);
  for (auto _ : state) benchmark::DoNotOptimize(scan_grid_inf(crit, grid, kCtx, dirs));
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_InfScan)->Unit(benchmark::kMillisecond);

void BM_ScreenProbe(benchmark::State& state) {
  const DirectionGrid dirs(64);
  const auto ctx = WaveContext::from_wavenumber(6.0);
  const int n = 128;
  const auto mesh = with_screen_range(discretize_curve({Segment{}}, n), 0, n - 1);
  const auto dec = spectral_decompose(far_field_operator(mesh, ctx, {NeumannBC{}, true}, dirs));
  std::vector<ProbeSegment> probes;
  for (int i = 0; i < 24; ++i) probes.push_back({{-3.0 + 0.25 * i, 0.0}, {-2.75 + 0.25 * i, 0.0}, 32});
  for (auto _ : state) {
    benchmark::DoNotOptimize(screen_probe(dec, probes, ctx, dirs, 1e-8, SegmentLayer::double_layer));
  }
}
BENCHMARK(BM_ScreenProbe)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
