#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "pal/errors.hpp"
#include "pal/lattice.hpp"
#include "pal/poisson.hpp"
#include "pal/rng.hpp"
#include "pal/stein.hpp"

using namespace pal;

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<300>>;

// Plain forward recursion carried out with 300 decimal digits; the
// amplification i!/lambda^i stays far below that for the ranges used here.
std::vector<double> oracle_ghat(double lambda, const std::vector<double>& g) {
  const int n = static_cast<int>(g.size()) - 1;
  const Big lam(lambda);
  Big p = exp(-lam), mass = 0, mean = 0;
  for (int k = 0; k <= n; ++k) {
    mean += p * Big(g[k]);
    mass += p;
    p = p * lam / (k + 1);
  }
  mean += (Big(1) - mass) * Big(g[n]);
  std::vector<double> out(n + 2);
  Big h = 0;
  for (int i = 0; i <= n; ++i) {
    out[i] = static_cast<double>(h);
    h = (Big(i) * h + Big(g[i]) - mean) / lam;
  }
  out[n + 1] = static_cast<double>(h);
  return out;
}

std::vector<double> iota_g(int n) {
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = i;
  return g;
}

}  // namespace

TEST(SolveStein, ConstantGGivesZero) {
  for (double lam : {0.0, 0.3, 4.0}) {
    const SteinSolution s = solve_stein(lam, std::vector<double>(80, 2.5));
    for (double v : s.ghat_values) EXPECT_EQ(v, 0.0);
    const MagicFactors mf = magic_factor_report(s);
    EXPECT_EQ(mf.sup_abs, 0.0);
    EXPECT_EQ(mf.sup_delta, 0.0);
  }
}

TEST(SolveStein, ZeroRateClosedForm) {
  const SteinSolution s = solve_stein(0.0, iota_g(30));
  EXPECT_EQ(s.ghat_values[0], 0.0);
  for (int i = 1; i <= 30; ++i) EXPECT_DOUBLE_EQ(s.ghat_values[i], -1.0);
}

TEST(SolveStein, IdentityAtUnitRate) {
  const std::vector<double> g = iota_g(stein_range(1.0, 0));
  const SteinSolution s = solve_stein(1.0, g);
  EXPECT_LE(s.max_residual(), 1e-10);
  const auto want = oracle_ghat(1.0, g);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.ghat_values[i], want[i], 1e-12) << i;
  // ghat(i) = -1 for i >= 1 solves lambda*ghat(i+1) - i*ghat(i) = i - lambda;
  // near N the constant continuation of g takes over
  for (std::size_t i = 1; i <= 30; ++i) EXPECT_NEAR(s.ghat_values[i], -1.0, 1e-12);
  const MagicFactors mf = magic_factor_report(s);
  EXPECT_NEAR(mf.sup_abs, 1.0, 1e-12);
  EXPECT_NEAR(mf.sup_delta, 1.0, 1e-12);
}

TEST(SolveStein, MatchesExtendedPrecisionRecursion) {
  Rng rng = make_stream(21, 0);
  for (double lam : {0.1, 0.8, 2.5, 6.0, 10.0}) {
    for (int t = 0; t < 10; ++t) {
      const std::vector<double> g = random_lipschitz_sequence(rng, stein_range(lam, 0));
      const SteinSolution s = solve_stein(lam, g);
      const auto want = oracle_ghat(lam, g);
      ASSERT_EQ(want.size(), s.ghat_values.size());
      for (std::size_t i = 0; i < want.size(); ++i)
        EXPECT_NEAR(s.ghat_values[i], want[i], 1e-11) << "lambda " << lam << " i " << i;
    }
  }
}

TEST(SolveStein, ResidualAndMagicFactorsOnRandomGrid) {
  Rng rng = make_stream(22, 0);
  for (int t = 0; t < 300; ++t) {
    const double lam = 0.1 + 9.9 * uniform01(rng);
    const SteinSolution s = solve_stein(lam, random_lipschitz_sequence(rng, 300));
    EXPECT_LE(s.max_residual(), 1e-10);
    const MagicFactors mf = magic_factor_report(s);
    EXPECT_LE(mf.sup_abs, 1.0 + 1e-12);
    EXPECT_LE(mf.sup_delta, 1.0 + 1e-12);
  }
}

TEST(SolveStein, LargeRateStaysStable) {
  Rng rng = make_stream(23, 0);
  for (double lam : {40.0, 150.0}) {
    const SteinSolution s = solve_stein(lam, random_lipschitz_sequence(rng, stein_range(lam, 0)));
    EXPECT_LE(s.max_residual(), 1e-10 * lam);
    EXPECT_LE(magic_factor_report(s).sup_delta, 1.0 + 1e-12);
  }
}

TEST(SolveStein, AffineInG) {
  Rng rng = make_stream(24, 0);
  for (int t = 0; t < 20; ++t) {
    const double lam = 0.1 + 9.9 * uniform01(rng);
    const auto g1 = random_lipschitz_sequence(rng, 200);
    const auto g2 = random_lipschitz_sequence(rng, 200);
    const double a = 0.7 * uniform01(rng), b = -(1.0 - a) * uniform01(rng);
    std::vector<double> mix(g1.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * g1[i] + b * g2[i];
    const SteinSolution s1 = solve_stein(lam, g1), s2 = solve_stein(lam, g2), sm = solve_stein(lam, mix);
    for (std::size_t i = 0; i < sm.ghat_values.size(); ++i)
      EXPECT_NEAR(sm.ghat_values[i], a * s1.ghat_values[i] + b * s2.ghat_values[i], 1e-10);
  }
}

TEST(SolveStein, ContractAndParameterErrors) {
  EXPECT_THROW(solve_stein(1.0, std::vector<double>{0.0, 1.5, 1.0}), ContractError);
  EXPECT_THROW(solve_stein(-0.5, iota_g(10)), ParameterError);
  // range far too short for the Poisson tail at this rate
  EXPECT_THROW(solve_stein(50.0, iota_g(10)), ContractError);
}

TEST(SolveStein, RangeRule) {
  EXPECT_EQ(stein_range(0.0, 0), 50);
  EXPECT_EQ(stein_range(4.0, 0), 78);
  EXPECT_EQ(stein_range(1.0, 500), 500);
}

TEST(LatticeFunction, ClampingKeepsLipschitz) {
  const LatticeFunction f = LatticeFunction::tabulate({3, 2}, [](std::span<const int> x) { return x[0] - 0.5 * x[1]; });
  EXPECT_DOUBLE_EQ(f.lipschitz_constant(), 1.0);
  EXPECT_DOUBLE_EQ(f(LatticePoint{7, 0}), 3.0);
  EXPECT_DOUBLE_EQ(f(LatticePoint{1, 9}), 0.0);
  EXPECT_TRUE(f.covers(LatticePoint{3, 2}));
  EXPECT_FALSE(f.covers(LatticePoint{4, 0}));
  Rng rng = make_stream(25, 0);
  for (int t = 0; t < 50; ++t) EXPECT_LE(random_lipschitz_function(rng, {6, 5, 4}).lipschitz_constant(), 1.0 + 1e-12);
}

TEST(Decomposition, PoissonAgainstItself) {
  const PoissonVectorParams lam{{0.8, 1.7}};
  const LatticePmf x = poisson_vector_pmf(lam, 1e-13);
  Rng rng = make_stream(26, 0);
  const LatticeFunction g = random_lipschitz_function(rng, x.upper_corner());
  const DecompositionReport r = decomposition_check(x, lam, g);
  EXPECT_LE(std::abs(r.lhs), 1e-10 + r.truncation);
  EXPECT_LE(std::abs(r.rhs), 1e-10 + r.truncation);
  EXPECT_LE(r.residual, 1e-10 + r.truncation);
}

TEST(Decomposition, BernoulliIdentity) {
  const double p = 0.3;
  const LatticePmf x = bernoulli_sum_pmf({{p}});
  const LatticeFunction g = LatticeFunction::tabulate({80}, [](std::span<const int> v) { return double(v[0]); });
  const DecompositionReport r = decomposition_check(x, PoissonVectorParams{{p}}, g);
  // E[P] - E[X] = 0 for the identity
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_LE(r.residual, 1e-9);
}

TEST(Decomposition, OneDimensionalSecondWriter) {
  // independent evaluation of E[X ghat(X) - lambda ghat(X+1)] from the
  // extended-precision solution
  Rng rng = make_stream(27, 0);
  for (int t = 0; t < 10; ++t) {
    const double lam = 0.2 + 3.0 * uniform01(rng);
    std::vector<std::vector<double>> rows(6, std::vector<double>(1));
    for (auto& r : rows) r[0] = 0.5 * uniform01(rng);
    const LatticePmf x = bernoulli_sum_pmf(rows);
    const int n = stein_range(lam, 8);
    const std::vector<double> gv = random_lipschitz_sequence(rng, n);
    const LatticeFunction g({n}, gv);
    const auto h = oracle_ghat(lam, gv);
    double want = 0.0;
    for (const auto& [pt, pr] : x.atoms()) want += pr * (pt[0] * h[pt[0]] - lam * h[pt[0] + 1]);
    const DecompositionReport r = decomposition_check(x, PoissonVectorParams{{lam}}, g);
    EXPECT_NEAR(r.rhs, want, 1e-11);
    EXPECT_LE(r.residual, 1e-8 + r.truncation);
  }
}

TEST(Decomposition, RandomArraysUpToThreeCoordinates) {
  Rng rng = make_stream(28, 0);
  for (int t = 0; t < 12; ++t) {
    const int d = 1 + t % 3;
    const int n = 3 + static_cast<int>(rng() % 4);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
      for (auto& v : r) v = 0.6 / d * uniform01(rng);
    const LatticePmf x = bernoulli_sum_pmf(rows);
    PoissonVectorParams lam{std::vector<double>(d)};
    for (auto& l : lam.lambdas) l = 0.1 + 1.5 * uniform01(rng);
    const LatticeFunction g = random_lipschitz_function(rng, LatticePoint(d, 12));
    const DecompositionReport r = decomposition_check(x, lam, g);
    EXPECT_LE(r.residual, 1e-8 + r.truncation) << "d=" << d;
    EXPECT_LE(r.truncation, 1e-12);
  }
}

TEST(SteinGrid, RowsCoverTheGrid) {
  const auto rows = stein_check_grid({0.5, 2.0}, 3, 100, 9, Exec::kSerial);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[4].lambda, 2.0);
  EXPECT_EQ(rows[4].g_id, 1);
  for (const auto& r : rows) {
    EXPECT_LE(r.sup_abs, 1.0 + 1e-12);
    EXPECT_LE(r.residual, 1e-10);
  }
}
