#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pal {

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and its standard error (sd / sqrt(n), sd with n - 1).
MeanSe mean_and_se(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of category counts to probabilities. Neighbouring
/// categories are pooled from the right until every expected count is >= min_expected.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs,
                               double min_expected = 5.0);

/// Goodness of fit of non-negative integer samples to Poisson(mean).
ChiSquareResult chi_square_poisson(std::span<const long> samples, double mean, double min_expected = 5.0);

}  // namespace pal
