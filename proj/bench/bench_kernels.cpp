// Serial vs OpenMP kernels. Set OMP_NUM_THREADS to pick the team size.
#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "chargecast/kernels.hpp"

using namespace chargecast;

namespace {

GeoPolygon rect(double lon0, double lat0, double lon1, double lat1) {
  return {{{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}}, {}};
}

std::vector<GeoPolygon> grid(int side, double cell) {
  std::vector<GeoPolygon> out;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      out.push_back(rect(4.3 + c * cell, 50.8 + r * cell, 4.3 + (c + 1) * cell, 50.8 + (r + 1) * cell));
    }
  }
  return out;
}

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  Matrix m(n);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

std::vector<GeoPolygon> random_cells(int n, double span) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, span);
  std::vector<GeoPolygon> cells;
  for (int k = 0; k < n; ++k) {
    const double x = 4.3 + u(rng), y = 50.8 + u(rng);
    cells.push_back(rect(x, y, x + 0.004, y + 0.004));
  }
  return cells;
}

std::vector<GeoPolyline> random_lines(int n, double span) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, span);
  std::vector<GeoPolyline> lines;
  for (int k = 0; k < n; ++k) {
    GeoPolyline l;
    for (int v = 0; v < 4; ++v) l.points.push_back({4.3 + u(rng), 50.8 + u(rng)});
    lines.push_back(l);
  }
  return lines;
}

template <bool Parallel>
void BM_mc_means(benchmark::State& state) {
  const auto polys = grid(static_cast<int>(state.range(0)), 0.01);
  std::vector<std::uint64_t> seeds(polys.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  for (auto _ : state) {
    auto r = Parallel ? kernels::omp::mc_means(polys, seeds, 20000) : kernels::serial::mc_means(polys, seeds, 20000);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_energy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto trips = random_matrix(n, 1), dist = random_matrix(n, 2);
  Matrix scaled(n), out(n);
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::scale_by_driving_ratio(trips, dist, 0.759, 0.466, scaled);
      kernels::omp::energy(scaled, dist, 0.22, out);
      benchmark::DoNotOptimize(kernels::omp::col_sums(out));
    } else {
      kernels::serial::scale_by_driving_ratio(trips, dist, 0.759, 0.466, scaled);
      kernels::serial::energy(scaled, dist, 0.22, out);
      benchmark::DoNotOptimize(kernels::serial::col_sums(out));
    }
  }
}

template <bool Parallel>
void BM_best_iou(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto zones = grid(side, 0.01);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < zones.size(); ++i) ids.push_back("z" + std::to_string(i));
  const auto cells = random_cells(500, 0.01 * side);
  for (auto _ : state) {
    auto r = Parallel ? kernels::omp::best_iou_zone(cells, zones, ids)
                      : kernels::serial::best_iou_zone(cells, zones, ids);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_split_all(benchmark::State& state) {
  const auto zones = grid(static_cast<int>(state.range(0)), 0.01);
  const auto lines = random_lines(1000, 0.01 * static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? kernels::omp::split_all(lines, zones, 0.001) : kernels::serial::split_all(lines, zones, 0.001);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_mc_means<false>)->Name("mc_means/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_means<true>)->Name("mc_means/omp")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_energy<false>)->Name("energy/serial")->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_energy<true>)->Name("energy/omp")->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_best_iou<false>)->Name("best_iou_zone/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_best_iou<true>)->Name("best_iou_zone/omp")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_split_all<false>)->Name("split_all/serial")->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_split_all<true>)->Name("split_all/omp")->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
