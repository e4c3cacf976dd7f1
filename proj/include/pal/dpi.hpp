#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pal/coupling.hpp"
#include "pal/geometry.hpp"
#include "pal/intensity.hpp"
#include "pal/lattice.hpp"
#include "pal/parallel.hpp"
#include "pal/rng.hpp"

namespace pal {

/// A point process seen through its count vectors: a sampler, an exact
/// count law per partition, or both (the exact law is preferred).
struct CountSource {
  std::function<PointPattern(Rng&)> sampler;
  std::function<LatticePmf(const PartitionSpec&)> exact;
  /// E xi(window); required together with `exact`.
  std::optional<double> exact_mean_total;

  /// Poisson process: independent Poisson counts with means measure(A_i).
  static CountSource poisson(std::function<double(const Region&)> measure, double total, double eps = 1e-10);
  static CountSource poisson(const IntensityMeasure& intensity, double eps = 1e-10);
  /// Deterministic pattern.
  static CountSource fixed(PointPattern pattern);
  static CountSource sampled(std::function<PointPattern(Rng&)> sampler);
};

struct PartitionDistance {
  double wasserstein = 0.0;
  double wasserstein_truncation = 0.0;
  double total_variation = 0.0;
  double total_variation_truncation = 0.0;
};

struct DpiEstimate {
  /// Max over the partitions of d_W between count vectors: a lower bound on d_pi only.
  double estimate = 0.0;
  double std_error = 0.0;  // bootstrap; 0 when both sides are exact
  int best_partition = -1;
  std::vector<PartitionDistance> per_partition;
  /// |E xi(window) - E eta(window)| from the same representations.
  double mean_shift = 0.0;
  bool exact = false;
};

struct DpiOptions {
  std::uint64_t reps = 20000;
  std::uint64_t seed = 1;
  int bootstrap = 20;
  double poisson_eps = 1e-10;
  Exec exec = Exec::kParallel;
};

DpiEstimate dpi_lower_bound(const CountSource& xi, const CountSource& eta, const std::vector<PartitionSpec>& partitions,
                            const DpiOptions& opt);

/// Terms of one prefix (A_1, ..., A_i) of a tuple of disjoint sets.
struct PrefixTerms {
  double lambda_last = 0.0;          // lambda(A_i)
  QTermTable q;                      // q^{A_{1:i}}
  std::vector<double> abs_z_means;   // E|Z_j|, j = 1..i
};

/// sum_i (sum_m |q_m| + 2 lambda(A_i) sum_{j<=i} E|Z_j|) for one tuple of sets.
double tuple_sum_bound(const std::vector<PrefixTerms>& prefixes);

/// Prefix terms from the exact (or empirical) law of (xi(A_1), ..., xi(A_d)),
/// the target means lambda(A_i), and one coupling table per prefix.
std::vector<PrefixTerms> prefix_terms(const LatticePmf& counts, const std::vector<double>& lambdas,
                                      const std::vector<CouplingTable>& couplings);

}  // namespace pal
