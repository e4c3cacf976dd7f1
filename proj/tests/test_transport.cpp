#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pal/errors.hpp"
#include "pal/lattice.hpp"
#include "pal/poisson.hpp"
#include "pal/rng.hpp"
#include "pal/stein.hpp"
#include "pal/transport.hpp"

using namespace pal;

namespace {

LatticePmf random_pmf(Rng& rng, int dim, int atoms, int extent) {
  LatticePmf::AtomMap m;
  atoms = std::min<double>(atoms, std::pow(extent + 1.0, dim));
  while (static_cast<int>(m.size()) < atoms) {
    LatticePoint x(dim);
    for (auto& v : x) v = static_cast<int>(rng() % (extent + 1));
    m[x] = 0.0;
  }
  double total = 0.0;
  for (auto& [x, p] : m) total += (p = uniform01(rng));
  for (auto& [x, p] : m) p /= total;
  return LatticePmf(dim, std::move(m));
}

LatticePmf from_case(const nlohmann::json& c, const char* side) {
  LatticePmf::AtomMap m;
  for (const auto& a : c.at(side)) m[a.at("x").get<LatticePoint>()] = a.at("p").get<double>();
  double total = 0.0;
  for (const auto& [x, p] : m) total += p;
  return LatticePmf(c.at("dim").get<int>(), std::move(m), std::max(0.0, 1.0 - total), 0.0);
}

}  // namespace

TEST(Wasserstein, DiracPair) {
  EXPECT_EQ(wasserstein_l1(LatticePmf::dirac({2, 3}), LatticePmf::dirac({4, 1})).value, 4.0);
}

TEST(Wasserstein, IdenticalLawsGiveZero) {
  const LatticePmf p = poisson_vector_pmf({{1.2, 0.4}}, 1e-9);
  EXPECT_NEAR(wasserstein_l1(p, p).value, 0.0, 1e-15);
}

TEST(Wasserstein, TruncationErrorFormula) {
  const LatticePmf p = poisson_vector_pmf({{1.0}}, 1e-6);
  const LatticePmf q = LatticePmf::dirac({0});
  const DistanceResult r = wasserstein_l1(p, q);
  const double diam = p.max_l1();
  EXPECT_NEAR(r.truncation_error, p.tail_moment() + p.tail_mass() * diam, 1e-18);
  const LatticePmf exact = bernoulli_sum_pmf({{0.3}});
  EXPECT_EQ(wasserstein_l1(exact, q).truncation_error, 0.0);
}

TEST(Wasserstein, DenseLpOracle) {
  std::ifstream in(std::string(PAL_TEST_DATA_DIR) + "/w1_lp_oracle.json");
  ASSERT_TRUE(in.good());
  const nlohmann::json data = nlohmann::json::parse(in);
  int seen = 0;
  for (const auto& c : data.at("cases")) {
    const LatticePmf p = from_case(c, "p");
    const LatticePmf q = from_case(c, "q");
    const double want = c.at("w1").get<double>();
    for (TransportGraph g : {TransportGraph::kBipartite, TransportGraph::kLattice}) {
      TransportOptions o;
      o.graph = g;
      EXPECT_NEAR(wasserstein_l1(p, q, o).value, want, 1e-8) << c.at("name");
    }
    ++seen;
  }
  EXPECT_EQ(seen, 31);
}

TEST(Wasserstein, FlowIsACouplingAndCostMatches) {
  Rng rng = make_stream(3, 0);
  for (int t = 0; t < 20; ++t) {
    const int dim = 1 + t % 3;
    const LatticePmf p = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 60), 6);
    const LatticePmf q = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 60), 6);
    TransportOptions o;
    o.want_flow = true;
    const DistanceResult r = wasserstein_l1(p, q, o);
    ASSERT_TRUE(r.flow.has_value());
    std::map<LatticePoint, double> out, in;
    double mass = 0.0, cost = 0.0;
    for (const auto& f : *r.flow) {
      EXPECT_GE(f.mass, 0.0);
      out[f.from] += f.mass;
      in[f.to] += f.mass;
      mass += f.mass;
      cost += f.mass * l1_distance(f.from, f.to);
    }
    EXPECT_NEAR(mass, 1.0, 1e-9);
    EXPECT_NEAR(cost, r.value, 1e-9);
    for (const auto& [x, m] : p.atoms()) EXPECT_NEAR(out[x], m, 1e-9);
    for (const auto& [x, m] : q.atoms()) EXPECT_NEAR(in[x], m, 1e-9);
  }
}

TEST(Wasserstein, NoLipschitzFunctionBeatsTheValue) {
  Rng rng = make_stream(4, 0);
  for (int t = 0; t < 10; ++t) {
    const LatticePmf p = random_pmf(rng, 2, 30, 8);
    const LatticePmf q = random_pmf(rng, 2, 30, 8);
    const double w = wasserstein_l1(p, q).value;
    for (int k = 0; k < 50; ++k) {
      const LatticeFunction g = random_lipschitz_function(rng, {8, 8});
      double gap = 0.0;
      for (const auto& [x, m] : p.atoms()) gap += m * g(x);
      for (const auto& [x, m] : q.atoms()) gap -= m * g(x);
      EXPECT_LE(std::abs(gap), w + 1e-8);
    }
  }
}

TEST(Wasserstein, MetricAxioms) {
  Rng rng = make_stream(5, 0);
  for (int t = 0; t < 30; ++t) {
    const int dim = 1 + t % 3;
    const LatticePmf a = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 40), 7);
    const LatticePmf b = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 40), 7);
    const LatticePmf c = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 40), 7);
    const double ab = wasserstein_l1(a, b).value, ba = wasserstein_l1(b, a).value;
    const double bc = wasserstein_l1(b, c).value, ac = wasserstein_l1(a, c).value;
    EXPECT_NEAR(ab, ba, 1e-10);
    EXPECT_GE(ab + bc - ac, -1e-9);
    EXPECT_NEAR(wasserstein_l1(a, a).value, 0.0, 1e-12);
    if (a.atoms() != b.atoms()) {
      EXPECT_GT(ab, 0.0);
    }
  }
}

TEST(Wasserstein, TranslationLowerBound) {
  Rng rng = make_stream(6, 0);
  for (int t = 0; t < 20; ++t) {
    const LatticePmf a = random_pmf(rng, 2, 25, 9);
    const LatticePmf b = random_pmf(rng, 2, 25, 9);
    const auto ma = a.mean(), mb = b.mean();
    const double shift = std::abs(ma[0] - mb[0]) + std::abs(ma[1] - mb[1]);
    // sum of coordinates and its per-axis sign flips are all 1-Lipschitz
    double best = 0.0;
    for (int s0 : {-1, 1})
      for (int s1 : {-1, 1}) best = std::max(best, std::abs(s0 * (ma[0] - mb[0]) + s1 * (ma[1] - mb[1])));
    EXPECT_NEAR(best, shift, 1e-12);
    EXPECT_GE(wasserstein_l1(a, b).value, shift - 1e-9);
  }
}

TEST(Wasserstein, RejectsMismatchedDimensions) {
  EXPECT_THROW(wasserstein_l1(LatticePmf::dirac({0}), LatticePmf::dirac({0, 0})), ParameterError);
}

TEST(TotalVariation, Anchors) {
  EXPECT_EQ(total_variation(LatticePmf::dirac({0}), LatticePmf::dirac({1})).value, 1.0);
  const LatticePmf p = poisson_vector_pmf({{2.0}}, 1e-9);
  EXPECT_EQ(total_variation(p, p).value, 0.0);
}

TEST(TotalVariation, BinomialVersusPoisson) {
  const LatticePmf b = bernoulli_sum_pmf({{0.5}, {0.5}});
  const LatticePmf p = poisson_vector_pmf({{1.0}}, 1e-14);
  const double e = std::exp(-1.0);
  // remaining Poisson mass above 2 is 1 - e - e - e/2
  const double want = 0.5 * (std::abs(0.25 - e) + std::abs(0.5 - e) + std::abs(0.25 - e / 2) + (1 - 2.5 * e));
  const DistanceResult r = total_variation(b, p);
  EXPECT_NEAR(r.value, want, 1e-13);
  EXPECT_LE(r.truncation_error, 1e-14);
}

TEST(TotalVariation, NeverExceedsWasserstein) {
  Rng rng = make_stream(8, 0);
  for (int t = 0; t < 40; ++t) {
    const int dim = 1 + t % 3;
    const LatticePmf a = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 50), 6);
    const LatticePmf b = random_pmf(rng, dim, 1 + static_cast<int>(rng() % 50), 6);
    EXPECT_LE(total_variation(a, b).value, wasserstein_l1(a, b).value + 1e-9);
  }
}

TEST(Wasserstein, LargeSupportsUseLatticeGraph) {
  const LatticePmf p = poisson_vector_pmf({{4.0, 4.0, 3.0}}, 1e-8);
  const LatticePmf q = poisson_vector_pmf({{4.5, 3.5, 3.0}}, 1e-8);
  TransportOptions lattice;
  lattice.graph = TransportGraph::kLattice;
  const double w = wasserstein_l1(p, q, lattice).value;
  EXPECT_NEAR(wasserstein_l1(p, q).value, w, 1e-10);
  // mean shift 1 is attained by the independent coordinatewise Poisson coupling
  EXPECT_NEAR(w, 1.0, 1e-6);
}
