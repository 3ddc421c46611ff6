#include <benchmark/benchmark.h>

#include "paramot/geodesic.hpp"
#include "paramot/metric.hpp"
#include "paramot/oracle.hpp"
#include "paramot/potential.hpp"
#include "paramot/pushforward.hpp"
#include "paramot/sampler.hpp"

using namespace paramot;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

void BM_draw_normal(benchmark::State& state) {
  const BaseMeasure measure = BaseMeasure::standard_normal(2);
  const Eigen::Index n = state.range(0);
  for (auto _ : state) {
    SampleBatch batch = draw(measure, 1, n);
    benchmark::DoNotOptimize(batch.points.data());
  }
  state.SetItemsProcessed(state.iterations() * n * 2);
}
BENCHMARK(BM_draw_normal)->Arg(10000)->Arg(100000);

void BM_expect(benchmark::State& state) {
  const SampleBatch batch =
      draw(BaseMeasure::standard_normal(1), 1, state.range(0));
  auto f = [](const RowVectorXd& z) { return z(0) * z(0); };
  for (auto _ : state) benchmark::DoNotOptimize(expect(batch, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_expect)->Arg(100000);

void BM_metric_map(benchmark::State& state) {
  const SampleBatch batch =
      draw(BaseMeasure::standard_normal(1), 1, state.range(0));
  const MapFamily fam = MapFamily::location_scale_1d();
  MetricOptions opts;
  opts.jackknife_blocks = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(metric_map(fam, vec2(0, 1), batch, opts).M.data());
}
BENCHMARK(BM_metric_map)->Arg(100000);

void BM_potential_solve(benchmark::State& state) {
  const SampleBatch batch =
      draw(BaseMeasure::standard_normal(1), 1, state.range(0));
  const MapFamily fam = MapFamily::location_scale_1d();
  const PotentialBasis basis = PotentialBasis::polynomial(1, 2);
  MetricOptions opts;
  opts.jackknife_blocks = 0;
  for (auto _ : state) {
    PotentialProjection proj(fam, vec2(0, 1), batch, basis, opts);
    benchmark::DoNotOptimize(proj.solve(vec2(1, 1)).data());
  }
}
BENCHMARK(BM_potential_solve)->Arg(10000)->Arg(100000);

void BM_wasserstein_metric(benchmark::State& state) {
  const SampleBatch batch =
      draw(BaseMeasure::standard_normal(2), 1, state.range(0));
  const MapFamily fam = MapFamily::rotation_2d();
  const PotentialBasis basis = PotentialBasis::polynomial(2, 2);
  VectorXd theta(1);
  theta << 0.3;
  MetricOptions opts;
  opts.jackknife_blocks = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        metric_wasserstein(fam, theta, batch, basis, opts).M.data());
}
BENCHMARK(BM_wasserstein_metric)->Arg(10000)->Arg(100000);

void BM_kinetic_action(benchmark::State& state) {
  const SampleBatch batch =
      draw(BaseMeasure::standard_normal(1), 1, state.range(0));
  const MapFamily fam = MapFamily::location_scale_1d();
  const PotentialBasis basis = PotentialBasis::polynomial(1, 2);
  const ParamPath path = ParamPath::linear(vec2(0, 1), vec2(2, 3), 16);
  MetricOptions opts;
  opts.jackknife_blocks = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(action(fam, path, batch, basis,
                                    MetricTensor::Kind::wasserstein, opts)
                                 .action);
}
BENCHMARK(BM_kinetic_action)->Arg(10000)->Arg(100000);

void BM_wp_quantile(benchmark::State& state) {
  const Quantile1D a = Quantile1D::gaussian(0, 1);
  const Quantile1D b = Quantile1D::gaussian(2, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(wp_quantile(a, b, 3.0, state.range(0)));
}
BENCHMARK(BM_wp_quantile)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
