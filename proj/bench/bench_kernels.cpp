// Serial reference vs OpenMP path for the heavy kernels. The argument picks
// the path (0 serial, 1 parallel); thread count follows PAL_THREADS.
#include <benchmark/benchmark.h>

#include "pal/bernoulli.hpp"
#include "pal/dpi.hpp"
#include "pal/gibbs.hpp"
#include "pal/intensity.hpp"
#include "pal/stein.hpp"
#include "pal/ustat.hpp"

using namespace pal;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::kParallel : Exec::kSerial; }

GibbsModel strauss() {
  GibbsModel g;
  g.beta = 3.0;
  g.theta = 0.5;
  g.rho = 0.1;
  return g;
}

void BM_SteinGrid(benchmark::State& state) {
  const std::vector<double> lams{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(stein_check_grid(lams, 50, 300, 1, exec_of(state)));
}

void BM_MdepSums(benchmark::State& state) {
  const BernoulliArrayModel model = make_sliding_min_model(ProbMatrix(60, std::vector<double>{0.1, 0.05, 0.08}), 2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mdep_sums(model, 20000, 2, exec_of(state)));
}

void BM_EmpiricalPoissonDistance(benchmark::State& state) {
  const BernoulliArrayModel model = make_sliding_min_model(ProbMatrix(40, std::vector<double>{0.1, 0.06}), 1);
  const SampleBatch batch = sample_mdep_sums(model, 20000, 3, Exec::kSerial);
  for (auto _ : state)
    benchmark::DoNotOptimize(empirical_poisson_distance(batch, model.lambdas(), 10, 4, exec_of(state)));
}

void BM_PapangelouBound(benchmark::State& state) {
  const GibbsModel g = strauss();
  PapangelouOptions opt;
  opt.reps = 5000;
  opt.exec = exec_of(state);
  const IntensityMeasure f = IntensityMeasure::constant(g.window, g.beta);
  for (auto _ : state) benchmark::DoNotOptimize(papangelou_bound(g, f, opt));
}

void BM_GnzCheck(benchmark::State& state) {
  GnzOptions opt;
  opt.reps = 5000;
  opt.exec = exec_of(state);
  const auto u = gnz_total_count();
  for (auto _ : state) benchmark::DoNotOptimize(gnz_check(strauss(), u, opt));
}

void BM_UStatTupleBound(benchmark::State& state) {
  const auto model = make_interval_pair_model(3.0, 0.2);
  const PartitionSpec grid = grid_partition(Box::unit(1), {4});
  for (auto _ : state) benchmark::DoNotOptimize(ustat_tuple_bound(*model, grid, 5000, 5, exec_of(state)));
}

void BM_DpiLowerBound(benchmark::State& state) {
  const GibbsModel g = strauss();
  const CountSource xi = CountSource::sampled([g](Rng& rng) { return sample_gibbs(g, rng); });
  const CountSource eta = CountSource::poisson(IntensityMeasure::constant(g.window, g.beta));
  const std::vector<PartitionSpec> parts{grid_partition(g.window, {1, 1}), grid_partition(g.window, {2, 2})};
  DpiOptions opt;
  opt.reps = 10000;
  opt.bootstrap = 5;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(dpi_lower_bound(xi, eta, parts, opt));
}

}  // namespace

BENCHMARK(BM_SteinGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MdepSums)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalPoissonDistance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PapangelouBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GnzCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UStatTupleBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DpiLowerBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
