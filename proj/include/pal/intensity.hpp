#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "json.hpp"
#include "pal/geometry.hpp"
#include "pal/rng.hpp"

namespace pal {

/// Finite measure f dnu on a window: nu is Lebesgue on a box or counting
/// measure on a label space.
class IntensityMeasure {
 public:
  static IntensityMeasure constant(Box window, double value);
  /// f(x) = a + b . x, required to be >= 0 on the window.
  static IntensityMeasure linear(Box window, double a, std::vector<double> b);
  static IntensityMeasure labels(std::vector<double> weights);
  /// Arbitrary bounded density on a box of dimension <= 2; the total is found by quadrature.
  static IntensityMeasure custom(Box window, std::function<double(std::span<const double>)> f, double sup_density);

  static IntensityMeasure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const Window& window() const { return window_; }
  double density(std::span<const double> x) const;
  double sup_density() const { return sup_; }
  double total() const { return total_; }
  /// Error bound on total() (0 for closed forms).
  double total_error() const { return total_error_; }
  bool is_constant() const { return kind_ == Kind::kConstant; }
  /// int_{R cap window} f dnu
  double measure(const Region& r) const;

 private:
  enum class Kind { kConstant, kLinear, kLabels, kCustom };
  Kind kind_ = Kind::kConstant;
  Window window_;
  double a_ = 0.0;
  std::vector<double> b_;
  std::vector<double> weights_;
  std::function<double(std::span<const double>)> f_;
  double sup_ = 0.0;
  double total_ = 0.0;
  double total_error_ = 0.0;
};

/// Patterns with more expected points than this are refused.
inline constexpr double kMaxExpectedPoints = 1e7;

/// One point from f / total.
Point sample_point(const IntensityMeasure& intensity, Rng& rng);

/// N ~ Poisson(total), then N i.i.d. points from f / total (rejection against sup f).
PointPattern sample_poisson_process(const IntensityMeasure& intensity, Rng& rng);
PointPattern sample_poisson_process(const IntensityMeasure& intensity, std::uint64_t seed);

}  // namespace pal
