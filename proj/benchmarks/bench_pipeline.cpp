#include <benchmark/benchmark.h>

#include <vector>

#include "cob/contours.hpp"
#include "cob/dense_reference.hpp"
#include "cob/partition.hpp"
#include "cob/timing.hpp"
#include "cob/ucm.hpp"
#include "cob/watershed.hpp"

namespace {

struct Fixture {
  cob::LabelMap labels;
  cob::OrientedStack stack;
  cob::SparseBoundaries weighted;
};

// Watershed regions and OWT strengths of the synthetic scene at one size.
Fixture make_fixture(int height, int width) {
  const std::vector<double> sigmas{2.0};
  auto scales = cob::multiscale_oriented_contours(cob::synthetic_image(height, width), sigmas);
  Fixture f{cob::watershed_oversegment(scales.front().strength), scales.front().stack, {}};
  const cob::SparseBoundaries sb = cob::sparse_from_labels(f.labels);
  f.weighted = cob::owt_reweight(sb, cob::arc_orientations(sb), f.stack);
  return f;
}

void size_args(benchmark::internal::Benchmark* b) {
  for (int h : {40, 80, 160, 321}) b->Args({h, h * 3 / 2});
}

void BM_SparseOwt(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    const cob::SparseBoundaries sb = cob::sparse_from_labels(f.labels);
    benchmark::DoNotOptimize(cob::owt_reweight(sb, cob::arc_orientations(sb), f.stack));
  }
  state.counters["regions"] = f.labels.region_count();
}
BENCHMARK(BM_SparseOwt)->Apply(size_args)->Unit(benchmark::kMillisecond);

void BM_DenseOwt(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(cob::dense_owt(f.labels, f.stack));
  state.counters["regions"] = f.labels.region_count();
}
BENCHMARK(BM_DenseOwt)->Apply(size_args)->Unit(benchmark::kMillisecond);

void BM_SparseUcm(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(cob::build_ucm(f.weighted, f.labels));
  state.counters["regions"] = f.labels.region_count();
}
BENCHMARK(BM_SparseUcm)->Apply(size_args)->Unit(benchmark::kMillisecond);

void BM_DenseUcm(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  cob::BoundaryGrid grid = cob::dense_from_sparse(f.weighted, f.labels);
  for (int r = 1; r < grid.rows(); r += 2) {
    for (int c = 1; c < grid.cols(); c += 2) grid(r, c) = 0.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(cob::dense_build_ucm(f.labels, grid));
  state.counters["regions"] = f.labels.region_count();
}
BENCHMARK(BM_DenseUcm)->Apply(size_args)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
