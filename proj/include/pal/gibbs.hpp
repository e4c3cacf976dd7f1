#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "json.hpp"
#include "pal/geometry.hpp"
#include "pal/intensity.hpp"
#include "pal/parallel.hpp"
#include "pal/quadrature.hpp"
#include "pal/rng.hpp"

namespace pal {

/// Pairwise-interaction process on a box with density proportional to
/// exp(-theta * #{pairs at distance <= rho}) against Poisson(beta * Lebesgue).
struct GibbsModel {
  double beta = 1.0;
  double theta = 0.0;
  double rho = 0.0;
  Box window = Box::unit(2);
  /// Sampling gives up (BudgetError) when it needs more than 20 / floor proposals.
  double acceptance_floor = 0.01;

  void validate() const;
  /// Points of xi within rho of x, skipping index `skip`.
  int neighbours(std::span<const double> x, const PointPattern& xi,
                 std::size_t skip = std::numeric_limits<std::size_t>::max()) const;
  /// c(x, xi) = beta * exp(-theta * #{y in xi : |x - y| <= rho})
  double papangelou(std::span<const double> x, const PointPattern& xi,
                    std::size_t skip = std::numeric_limits<std::size_t>::max()) const;
  long close_pairs(const PointPattern& xi) const;

  static GibbsModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Exact draw by rejection from Poisson(beta * Lebesgue).
PointPattern sample_gibbs(const GibbsModel& model, Rng& rng);
PointPattern sample_gibbs(const GibbsModel& model, std::uint64_t seed);

/// u(x, xi minus its point number `skip`); skip = max() removes nothing.
using GnzTestFunction = std::function<double(std::span<const double> x, const PointPattern& xi, std::size_t skip)>;

GnzTestFunction gnz_constant_one();
/// u(x, xi) = xi(window)
GnzTestFunction gnz_total_count();
/// u(x, xi) = 1_A(x) 1{xi(B) = 0}
GnzTestFunction gnz_indicator_empty(Box a, Box b);
/// {"kind":"one"} | {"kind":"count"} | {"kind":"indicator_empty","A":box,"B":box}
GnzTestFunction gnz_test_from_json(const nlohmann::json& j);

struct GnzReport {
  double lhs = 0.0;       // E sum_{x in xi} u(x, xi \ x)
  double rhs = 0.0;       // int E[c(x, xi) u(x, xi)] dx
  double std_error = 0.0; // of lhs - rhs
  double z_score = 0.0;
};

struct GnzOptions {
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  int inner_points = 64;  // uniform x per replicate for the right-hand integral
  Exec exec = Exec::kParallel;
};

GnzReport gnz_check(const GibbsModel& model, const GnzTestFunction& u, const GnzOptions& opt);

struct PapangelouReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double quadrature_error = 0.0;  // mean over replicates of the per-pattern error estimate
};

struct PapangelouOptions {
  std::uint64_t reps = 10000;
  std::uint64_t seed = 1;
  int gauss_order = 8;
  Exec exec = Exec::kParallel;
};

/// int |c(x, xi) - f(x)| dx for one pattern, with an error estimate; windows of dimension 1 or 2.
/// Exact along the first axis for constant f; otherwise each chord segment uses a fixed
/// Gauss rule whose error is not part of the estimate.
QuadResult papangelou_gap(const GibbsModel& model, const IntensityMeasure& target, const PointPattern& xi,
                          int gauss_order = 8);

/// Monte Carlo over patterns of int E|c(x, xi) - f(x)| dx.
PapangelouReport papangelou_bound(const GibbsModel& model, const IntensityMeasure& target,
                                  const PapangelouOptions& opt);

}  // namespace pal
