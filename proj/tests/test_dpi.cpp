#include <cmath>

#include <gtest/gtest.h>

#include "pal/coupling.hpp"
#include "pal/dpi.hpp"
#include "pal/errors.hpp"
#include "pal/gibbs.hpp"
#include "pal/intensity.hpp"
#include "pal/rng.hpp"
#include "pal/stats.hpp"

using namespace pal;

namespace {

DpiOptions serial_options(std::uint64_t reps, std::uint64_t seed) {
  DpiOptions o;
  o.reps = reps;
  o.seed = seed;
  o.exec = Exec::kSerial;
  return o;
}

PartitionSpec whole(const Box& b) { return PartitionSpec{{Region{b}}}; }

// Bernoulli thinning of a fixed grid: a non-Poisson process with known mean
CountSource thinned_grid(int side, double keep) {
  return CountSource::sampled([=](Rng& rng) {
    PointPattern p;
    for (int a = 0; a < side; ++a)
      for (int b = 0; b < side; ++b)
        if (uniform01(rng) < keep) p.points.push_back({(a + 0.5) / side, (b + 0.5) / side});
    return p;
  });
}

}  // namespace

TEST(Dpi, TwoPointDiracIsTwo) {
  const LabelSpace space{2};
  const CountSource a = CountSource::fixed(PointPattern{{{0.0}}});
  const CountSource b = CountSource::fixed(PointPattern{{{1.0}}});
  const PartitionSpec both{{Region{LabelSet{{0, 1}}}}};
  const DpiEstimate e = dpi_lower_bound(a, b, {both, singleton_partition(space)}, serial_options(10, 1));
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.estimate, 2.0);
  EXPECT_EQ(e.best_partition, 1);
  EXPECT_EQ(e.per_partition[0].wasserstein, 0.0);
  EXPECT_EQ(e.per_partition[1].total_variation, 1.0);
  EXPECT_EQ(e.mean_shift, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Dpi, IdenticalExactLawsGiveZero) {
  const IntensityMeasure mu = IntensityMeasure::linear(Box::unit(2), 1.0, {0.5, 2.0});
  const CountSource s = CountSource::poisson(mu);
  const auto parts = {grid_partition(Box::unit(2), {2, 2}), grid_partition(Box::unit(2), {3, 1})};
  const DpiEstimate e = dpi_lower_bound(s, s, parts, serial_options(10, 2));
  EXPECT_EQ(e.estimate, 0.0);
  EXPECT_EQ(e.mean_shift, 0.0);
}

TEST(Dpi, PoissonMeanShiftExact) {
  // Poisson laws are stochastically ordered, so W(Po(1), Po(2)) = 1
  const CountSource one = CountSource::poisson(IntensityMeasure::constant(Box::unit(2), 1.0), 1e-13);
  const CountSource two = CountSource::poisson(IntensityMeasure::constant(Box::unit(2), 2.0), 1e-13);
  const DpiEstimate e = dpi_lower_bound(one, two, {whole(Box::unit(2))}, serial_options(10, 3));
  EXPECT_NEAR(e.estimate, 1.0, 1e-10 + e.per_partition[0].wasserstein_truncation);
  EXPECT_DOUBLE_EQ(e.mean_shift, 1.0);
}

TEST(Dpi, PoissonMeanShiftSampled) {
  const CountSource one = CountSource::sampled(
      [mu = IntensityMeasure::constant(Box::unit(2), 1.0)](Rng& rng) { return sample_poisson_process(mu, rng); });
  const CountSource two = CountSource::poisson(IntensityMeasure::constant(Box::unit(2), 2.0), 1e-13);
  const DpiEstimate e = dpi_lower_bound(one, two, {whole(Box::unit(2))}, serial_options(20000, 4));
  EXPECT_FALSE(e.exact);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_GE(e.estimate, 1.0 - 4.0 * std::sqrt(1.0 / 20000));
  EXPECT_GE(e.estimate + e.per_partition[0].wasserstein_truncation + 1e-12, e.mean_shift);
}

TEST(Dpi, TotalVariationBelowWassersteinAndMeanShiftBelowEstimate) {
  const Box w = Box::unit(2);
  const std::vector<PartitionSpec> parts{whole(w), grid_partition(w, {2, 1}), grid_partition(w, {2, 2})};
  for (int t = 0; t < 6; ++t) {
    const double keep = 0.1 + 0.12 * t;
    const CountSource xi = thinned_grid(3, keep);
    const CountSource eta = CountSource::poisson(IntensityMeasure::constant(w, 9 * keep * (0.8 + 0.1 * t)), 1e-9);
    DpiOptions opt = serial_options(2000, 10 + t);
    opt.bootstrap = 0;
    const DpiEstimate e = dpi_lower_bound(xi, eta, parts, opt);
    for (const auto& p : e.per_partition)
      EXPECT_LE(p.total_variation, p.wasserstein + p.total_variation_truncation + 1e-9);
    EXPECT_GE(e.estimate, e.per_partition[0].wasserstein);
    EXPECT_GE(e.per_partition[0].wasserstein + e.per_partition[0].wasserstein_truncation + 1e-12, e.mean_shift);
  }
}

TEST(Dpi, BadInputsAreRejected) {
  const CountSource a = CountSource::fixed(PointPattern{});
  EXPECT_THROW(dpi_lower_bound(a, a, {}, serial_options(10, 1)), ParameterError);
  CountSource no_mean = a;
  no_mean.exact_mean_total.reset();
  EXPECT_THROW(dpi_lower_bound(no_mean, a, {whole(Box::unit(1))}, serial_options(10, 1)), ParameterError);
  const PartitionSpec overlapping{{Region{Box{{0.0}, {0.6}}}, Region{Box{{0.5}, {1.0}}}}};
  EXPECT_THROW(dpi_lower_bound(a, a, {overlapping}, serial_options(10, 1)), ParameterError);
}

TEST(TupleBound, PoissonWithZeroDisplacementVanishes) {
  const std::vector<double> lam{0.7, 1.4, 0.3};
  const LatticePmf x = poisson_vector_pmf(PoissonVectorParams{lam}, 1e-13);
  std::vector<CouplingTable> c;
  for (int i = 1; i <= 3; ++i) c.push_back(CouplingTable::zero(x.prefix_marginal(i)));
  const auto terms = prefix_terms(x, lam, c);
  ASSERT_EQ(terms.size(), 3u);
  for (const auto& t : terms)
    for (double z : t.abs_z_means) EXPECT_EQ(z, 0.0);
  EXPECT_LE(tuple_sum_bound(terms), 1e-10);
}

TEST(TupleBound, PrefixLengthsChecked) {
  const LatticePmf x = poisson_vector_pmf(PoissonVectorParams{{0.5, 0.5}}, 1e-12);
  auto terms = prefix_terms(x, {0.5, 0.5}, {CouplingTable::zero(x.prefix_marginal(1)), CouplingTable::zero(x)});
  std::swap(terms[0], terms[1]);
  EXPECT_THROW(tuple_sum_bound(terms), ParameterError);
  EXPECT_THROW(prefix_terms(x, {0.5}, {CouplingTable::zero(x)}), ParameterError);
}

TEST(TupleBound, BernoulliLabelsMatchCoordinateBound) {
  // one label per coordinate with an independent Bernoulli point: the tuple
  // bound with Z = 0 is sum_i 2 p_i^2 + 2 p_i sum_{j<i} 0 = the zero-coupling value
  const std::vector<double> p{0.2, 0.35};
  const LatticePmf x = bernoulli_sum_pmf({{p[0], 0.0}, {0.0, p[1]}});
  const auto terms = prefix_terms(x, p, {CouplingTable::zero(x.prefix_marginal(1)), CouplingTable::zero(x)});
  EXPECT_NEAR(tuple_sum_bound(terms), coupling_bound(PoissonVectorParams{p},
                                                     {CouplingTable::zero(x.prefix_marginal(1)), CouplingTable::zero(x)}),
              1e-15);
  EXPECT_NEAR(tuple_sum_bound(terms), 2 * p[0] * p[0] + 2 * p[1] * p[1], 1e-15);
}

TEST(TupleBound, PapangelouRouteMatchesIntegratedGap) {
  // With Z = 0 the GNZ equation gives |q_m| <= int_{A_i} E[|c - f| 1{X = m - e_i}].
  // A repulsive model with f = beta has c <= f, so every q_m has the same sign
  // and the tuple sum of |q| equals int E|c - f| = beta |W| - E xi(W) in expectation.
  GibbsModel g;
  g.beta = 3.0;
  g.theta = 1.0;
  g.rho = 0.15;
  const IntensityMeasure f = IntensityMeasure::constant(g.window, g.beta);
  const PartitionSpec halves = grid_partition(g.window, {2, 1});
  const std::uint64_t reps = 40000;
  std::map<LatticePoint, std::uint64_t> tally;
  std::vector<double> totals(reps);
  for (std::uint64_t t = 0; t < reps; ++t) {
    Rng rng = make_stream(41, t);
    const PointPattern xi = sample_gibbs(g, rng);
    ++tally[halves.counts(xi)];
    totals[t] = static_cast<double>(xi.size());
  }
  const LatticePmf x = empirical_pmf(2, tally);
  const std::vector<double> lam{f.measure(halves.sets[0]), f.measure(halves.sets[1])};
  const auto terms = prefix_terms(x, lam, {CouplingTable::zero(x.prefix_marginal(1)), CouplingTable::zero(x)});
  // signed: sum_i sum_m q_m = E xi(W) - lambda(W) for the empirical law itself
  double signed_sum = 0.0;
  for (const auto& t : terms)
    for (const auto& [m, q] : t.q.terms) signed_sum += q;
  const MeanSe n = mean_and_se(totals);
  EXPECT_NEAR(signed_sum, n.mean - g.beta, 1e-12);
  const double q_sum = tuple_sum_bound(terms);
  EXPECT_GE(q_sum, std::abs(signed_sum) - 1e-12);
  PapangelouOptions opt;
  opt.reps = 4000;
  opt.seed = 42;
  opt.exec = Exec::kSerial;
  const PapangelouReport r = papangelou_bound(g, f, opt);
  // the empirical law adds small opposite-sign q_m, hence the extra slack
  EXPECT_NEAR(q_sum, r.estimate, 4 * std::hypot(n.std_error, r.std_error) + 0.02);
}
