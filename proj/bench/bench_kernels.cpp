// OpenMP sampling kernel against the serial reference, on the default field grids.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "qpiston/density.hpp"
#include "qpiston/dynamics.hpp"

using namespace qpiston;

namespace {

struct Setup {
  SpectralState state;
  SpatialGrid grid;
};

Setup make_setup(Dimension d, std::size_t modes) {
  Truncation t{16, 0, 0};
  std::array<std::size_t, 3> points{2048, 1, 1};
  if (d == Dimension::disk2D) {
    t = {6, 3, 0};
    points = {256, 128, 1};
  } else if (d == Dimension::sphere3D) {
    t = {4, 0, 3};
    points = {128, 64, 32};
  }
  auto set = std::make_shared<const ModeSet>(WellGeometry(d, 1.0, 0.1), t);
  std::mt19937_64 rng(1);
  return {random_state(set, modes, rng), SpatialGrid::quadrature(d, 1.0, points)};
}

void BM_SampleWave(benchmark::State& st) {
  const auto d = static_cast<Dimension>(st.range(0));
  const auto backend = st.range(1) ? Backend::parallel : Backend::serial_reference;
  const auto s = make_setup(d, 8);
  for (auto _ : st) {
    auto w = sample_wave(s.state, s.grid, backend);
    benchmark::DoNotOptimize(w);
  }
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * s.grid.point_count()));
  st.SetLabel(to_string(d) + (st.range(1) ? " parallel" : " serial"));
}

}  // namespace

BENCHMARK(BM_SampleWave)
    ->ArgsProduct({{static_cast<int>(Dimension::segment1D), static_cast<int>(Dimension::disk2D),
                    static_cast<int>(Dimension::sphere3D)},
                   {0, 1}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
