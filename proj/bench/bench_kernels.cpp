#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "movsph/moving_spheres.hpp"
#include "movsph/nonlinearity.hpp"
#include "movsph/quadrature.hpp"

namespace {

using namespace movsph;

const Nonlinearity& bubble_f() {
  static const Nonlinearity f(HyderNgo{0.0, 2.0}, 2.0, 3);
  return f;
}

ScalarField bubble() {
  const double c = std::pow(std::pow(std::acos(-1.0), 1.5) * std::tgamma(2.5) / std::tgamma(4.0), 1.0 / 3.0);
  return [c](const Point& y) { return c * (1.0 + y.norm2()); };
}

std::vector<double> grid_source(const RadialGrid& grid) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::pow(1.0 + grid.nodes()[i] * grid.nodes()[i], -4.0);
  return s;
}

template <bool Parallel>
void BM_ApplySource(benchmark::State& state) {
  GridParams gp;
  gp.nodes = static_cast<std::size_t>(state.range(0));
  const auto grid = RadialGrid::geometric(gp);
  const IntegralOperator op(grid, 2.0);
  const auto source = grid_source(grid);
  for (auto _ : state) {
    auto out = Parallel ? op.apply_source(source) : op.apply_source_serial(source);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_ApplySource<true>)->Name("apply_source/parallel")->Arg(256)->Arg(512);
BENCHMARK(BM_ApplySource<false>)->Name("apply_source/serial")->Arg(256)->Arg(512);

template <bool Parallel>
void BM_KelvinDiff(benchmark::State& state) {
  const auto u = bubble();
  const Point x{1.0, 0.0, 0.0}, y{2.0, 0.5, 0.0};
  for (auto _ : state) {
    auto r = Parallel ? kelvin_diff_kernel(u, bubble_f(), x, 0.7, y)
                      : kelvin_diff_kernel_serial(u, bubble_f(), x, 0.7, y);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_KelvinDiff<true>)->Name("kelvin_diff_kernel/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KelvinDiff<false>)->Name("kelvin_diff_kernel/serial")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_ConditionCheck(benchmark::State& state) {
  const auto sampler = default_condition_sampler(3);
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? check_condition_F1(bubble_f(), sampler, count)
                      : check_condition_F1_serial(bubble_f(), sampler, count);
    benchmark::DoNotOptimize(r.min_margin);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_ConditionCheck<true>)->Name("check_condition/parallel")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConditionCheck<false>)->Name("check_condition/serial")->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
