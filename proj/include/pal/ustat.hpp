#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "pal/geometry.hpp"
#include "pal/intensity.hpp"
#include "pal/parallel.hpp"
#include "pal/rng.hpp"

namespace pal {

/// Point process on Y with one atom g(x_1, ..., x_k) for every unordered
/// k-subset of a Poisson process eta ~ mu lying in the symmetric domain D.
class UStatModel {
 public:
  virtual ~UStatModel() = default;
  virtual int order() const = 0;
  virtual const IntensityMeasure& base() const = 0;
  virtual const Box& y_window() const = 0;
  virtual bool in_domain(std::span<const Point> x) const = 0;
  virtual Point kernel(std::span<const Point> x) const = 0;
  /// mu{y : (prefix, y) in D} for a prefix of length k - 1 (k >= 2).
  virtual double last_section(std::span<const Point> prefix) const;
  /// Places where integrands in the coordinate after `prefix` may have kinks
  /// (fed to the quadrature as breakpoints; may be empty).
  virtual std::vector<double> section_breaks(std::span<const Point>) const { return {}; }
  /// lambda(A) = (1/k!) int_D 1{g in A} dmu^k for a box A of Y.
  virtual double intensity(const Box& a) const = 0;
  double total_intensity() const { return intensity(y_window()); }
  /// Tuple used for X^A when lambda(A) = 0.
  virtual std::vector<Point> fallback_tuple() const;
  virtual nlohmann::json to_json() const = 0;
};

/// k = 1, D = X, g = identity: the output is the input process.
std::shared_ptr<const UStatModel> make_identity_model(IntensityMeasure mu);
/// k = 2 on X = Y = [0,1], mu = t Lebesgue, D = {|x1 - x2| <= delta}, g = midpoint.
std::shared_ptr<const UStatModel> make_interval_pair_model(double t, double delta);
/// k = 3 on X = Y = [0,1], mu = t Lebesgue, D = {max - min <= delta}, g = mean.
std::shared_ptr<const UStatModel> make_cluster_triple_model(double t, double delta);
/// {"kind":"identity","base":intensity} | {"kind":"interval_pair","t":..,"delta":..} | {"kind":"cluster_triple",...}
std::shared_ptr<const UStatModel> ustat_model_from_json(const nlohmann::json& j);

/// Largest max-deviation found when permuting random tuples (0 for a symmetric model).
double ustat_symmetry_defect(const UStatModel& model, Rng& rng, int trials = 200);

/// Unordered k-subsets enumerated above this count raise CapacityError.
inline constexpr double kMaxTuples = 5e7;

PointPattern build_ustat_process(const PointPattern& points, const UStatModel& model);

struct RValue {
  double value = 0.0;
  double error = 0.0;
  std::vector<double> per_split;  // the integral for i = 1..k-1
};

/// max_{1<=i<k} int_{X^i} (int_{X^{k-i}} 1_D dmu^{k-i})^2 dmu^i, and 0 for k = 1.
RValue ustat_R(const UStatModel& model);

struct UStatBound {
  double value = 0.0;
  double error = 0.0;
  RValue r;
};

/// 2^{k+1} R / k!
UStatBound ustat_bound(const UStatModel& model);

/// Draws X^A: a k-tuple with density proportional to 1{g in A} 1_D against mu^k.
std::vector<Point> sample_xA(const UStatModel& model, const Box& a, Rng& rng, long max_attempts = 10'000'000);

struct MonteCarloValue {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// sum_i 2 lambda(A_i) sum_{j<=i} E Z_j for the coupling Z = xi(eta + Delta(X^{A_i}))(A_{1:i}) - xi(A_{1:i}) - delta_{g(X^{A_i})}(A_{1:i}),
/// whose q-terms all vanish; estimated by Monte Carlo.
MonteCarloValue ustat_tuple_bound(const UStatModel& model, const PartitionSpec& partition, std::uint64_t reps,
                                  std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace pal
