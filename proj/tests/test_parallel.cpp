// Every kernel with an Exec switch must give bit-identical output on the
// serial reference path and the OpenMP path.
#include <atomic>
#include <vector>

#include <gtest/gtest.h>

#include "pal/bernoulli.hpp"
#include "pal/dpi.hpp"
#include "pal/gibbs.hpp"
#include "pal/intensity.hpp"
#include "pal/parallel.hpp"
#include "pal/stein.hpp"
#include "pal/ustat.hpp"

using namespace pal;

namespace {

// more threads than cores on purpose: scheduling then actually interleaves
class Parallel : public ::testing::Test {
 protected:
  void SetUp() override { set_thread_count(4); }
  void TearDown() override { set_thread_count(0); }
};

BernoulliArrayModel small_mdep(int m) {
  ProbMatrix p(30, std::vector<double>{0.05, 0.08});
  for (std::size_t r = 0; r < p.size(); ++r) p[r][0] += 0.002 * static_cast<double>(r % 7);
  return make_sliding_min_model(p, m);
}

GibbsModel strauss() {
  GibbsModel g;
  g.beta = 4.0;
  g.theta = 0.7;
  g.rho = 0.12;
  return g;
}

}  // namespace

TEST_F(Parallel, ForEachIndexVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  for_each_index(hits.size(), Exec::kParallel, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST_F(Parallel, ForEachIndexRethrows) {
  EXPECT_THROW(for_each_index(100, Exec::kParallel,
                              [](std::size_t i) {
                                if (i == 37) throw std::runtime_error("boom");
                              }),
               std::runtime_error);
}

TEST_F(Parallel, SteinGrid) {
  const std::vector<double> lams{0.1, 1.5, 7.0};
  const auto s = stein_check_grid(lams, 20, 300, 5, Exec::kSerial);
  const auto p = stein_check_grid(lams, 20, 300, 5, Exec::kParallel);
  ASSERT_EQ(s.size(), p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].lambda, p[i].lambda);
    EXPECT_EQ(s[i].g_id, p[i].g_id);
    EXPECT_EQ(s[i].sup_abs, p[i].sup_abs);
    EXPECT_EQ(s[i].sup_delta, p[i].sup_delta);
    EXPECT_EQ(s[i].residual, p[i].residual);
  }
}

TEST_F(Parallel, QFactorsAndBound) {
  const BernoulliArrayModel model = small_mdep(2);
  const auto s = q_factors(model, {}, Exec::kSerial);
  const auto p = q_factors(model, {}, Exec::kParallel);
  ASSERT_EQ(s.size(), p.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_EQ(s[k].value, p[k].value);
    EXPECT_EQ(s[k].std_error, p[k].std_error);
  }
  EXPECT_EQ(mdep_bound(model, s), mdep_bound(model, p));
}

TEST_F(Parallel, MdepSums) {
  const BernoulliArrayModel model = small_mdep(1);
  const SampleBatch s = sample_mdep_sums(model, 3000, 77, Exec::kSerial);
  const SampleBatch p = sample_mdep_sums(model, 3000, 77, Exec::kParallel);
  EXPECT_EQ(s.rows, p.rows);
  EXPECT_EQ(s.seed, p.seed);
}

TEST_F(Parallel, GnzCheck) {
  GnzOptions opt;
  opt.reps = 3000;
  opt.seed = 9;
  opt.exec = Exec::kSerial;
  const auto u = gnz_indicator_empty(Box{{0.2, 0.2}, {0.6, 0.6}}, Box{{0.5, 0.5}, {0.9, 0.9}});
  const GnzReport s = gnz_check(strauss(), u, opt);
  opt.exec = Exec::kParallel;
  const GnzReport p = gnz_check(strauss(), u, opt);
  EXPECT_EQ(s.lhs, p.lhs);
  EXPECT_EQ(s.rhs, p.rhs);
  EXPECT_EQ(s.std_error, p.std_error);
  EXPECT_EQ(s.z_score, p.z_score);
}

TEST_F(Parallel, PapangelouBound) {
  PapangelouOptions opt;
  opt.reps = 800;
  opt.seed = 10;
  opt.exec = Exec::kSerial;
  const IntensityMeasure f = IntensityMeasure::linear(Box::unit(2), 2.0, {1.0, 0.5});
  const PapangelouReport s = papangelou_bound(strauss(), f, opt);
  opt.exec = Exec::kParallel;
  const PapangelouReport p = papangelou_bound(strauss(), f, opt);
  EXPECT_EQ(s.estimate, p.estimate);
  EXPECT_EQ(s.std_error, p.std_error);
  EXPECT_EQ(s.quadrature_error, p.quadrature_error);
}

TEST_F(Parallel, UStatTupleBound) {
  const auto model = make_interval_pair_model(3.0, 0.2);
  const PartitionSpec grid = grid_partition(Box::unit(1), {3});
  const MonteCarloValue s = ustat_tuple_bound(*model, grid, 2000, 11, Exec::kSerial);
  const MonteCarloValue p = ustat_tuple_bound(*model, grid, 2000, 11, Exec::kParallel);
  EXPECT_EQ(s.estimate, p.estimate);
  EXPECT_EQ(s.std_error, p.std_error);
}

TEST_F(Parallel, DpiLowerBound) {
  const GibbsModel g = strauss();
  const CountSource xi = CountSource::sampled([g](Rng& rng) { return sample_gibbs(g, rng); });
  const CountSource eta = CountSource::poisson(IntensityMeasure::constant(g.window, 2.5), 1e-10);
  const std::vector<PartitionSpec> parts{grid_partition(g.window, {1, 1}), grid_partition(g.window, {2, 1})};
  DpiOptions opt;
  opt.reps = 2000;
  opt.seed = 12;
  opt.bootstrap = 5;
  opt.exec = Exec::kSerial;
  const DpiEstimate s = dpi_lower_bound(xi, eta, parts, opt);
  opt.exec = Exec::kParallel;
  const DpiEstimate p = dpi_lower_bound(xi, eta, parts, opt);
  EXPECT_EQ(s.estimate, p.estimate);
  EXPECT_EQ(s.std_error, p.std_error);
  EXPECT_EQ(s.best_partition, p.best_partition);
  EXPECT_EQ(s.mean_shift, p.mean_shift);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    EXPECT_EQ(s.per_partition[i].wasserstein, p.per_partition[i].wasserstein);
    EXPECT_EQ(s.per_partition[i].total_variation, p.per_partition[i].total_variation);
  }
}

TEST_F(Parallel, EmpiricalPoissonDistance) {
  const BernoulliArrayModel model = small_mdep(1);
  const SampleBatch b = sample_mdep_sums(model, 5000, 13);
  const EmpiricalDistance s = empirical_poisson_distance(b, model.lambdas(), 8, 14, Exec::kSerial);
  const EmpiricalDistance p = empirical_poisson_distance(b, model.lambdas(), 8, 14, Exec::kParallel);
  EXPECT_EQ(s.value, p.value);
  EXPECT_EQ(s.std_error, p.std_error);
  EXPECT_EQ(s.truncation_error, p.truncation_error);
}
