#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"

namespace pal {

/// A point of N_0^d (or Z^d for coupling displacements).
using LatticePoint = std::vector<int>;

int l1_norm(std::span<const int> x);
int l1_distance(std::span<const int> x, std::span<const int> y);

/// Probability mass function on N_0^d with finite stored support.
///
/// Mass that was truncated away is tracked by `tail_mass`, and
/// `tail_moment` bounds E[|X|_1 ; X outside the stored support], so every
/// consumer can turn a computation on the stored atoms into a rigorous
/// interval for the untruncated law.
class LatticePmf {
 public:
  using AtomMap = std::map<LatticePoint, double>;

  /// Normalisation defects above this are rejected, never silently repaired.
  static constexpr double kNormalizationTolerance = 1e-9;

  LatticePmf(int dim, AtomMap atoms, double tail_mass = 0.0, double tail_moment = 0.0);

  static LatticePmf dirac(LatticePoint x);

  int dim() const { return dim_; }
  const AtomMap& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double tail_mass() const { return tail_mass_; }
  double tail_moment() const { return tail_moment_; }

  double prob(const LatticePoint& x) const;
  double stored_mass() const;
  /// |stored mass + tail mass - 1|.
  double normalization_defect() const;
  /// Mean of the stored atoms (the truncated law, not renormalised).
  std::vector<double> mean() const;
  /// Largest |x|_1 over stored atoms.
  int max_l1() const;
  /// Componentwise maximum over stored atoms.
  LatticePoint upper_corner() const;

  /// Law of the first `prefix` coordinates.
  LatticePmf prefix_marginal(int prefix) const;

 private:
  int dim_;
  AtomMap atoms_;
  double tail_mass_;
  double tail_moment_;
};

struct PoissonVectorParams {
  std::vector<double> lambdas;

  int dim() const { return static_cast<int>(lambdas.size()); }
  void validate() const;
};

/// Rows drawn from some law on N_0^d, with the seed that produced them.
struct SampleBatch {
  int dim = 1;
  std::vector<LatticePoint> rows;
  std::uint64_t seed = 0;

  std::size_t count() const { return rows.size(); }
  void validate() const;
};

/// Budget on stored atoms for truncated boxes and dense convolutions.
inline constexpr std::size_t kDefaultAtomBudget = 4'000'000;

/// Product of independent Poisson laws, truncated to a box whose excluded
/// mass is at most `eps`.
LatticePmf poisson_vector_pmf(const PoissonVectorParams& params, double eps,
                              std::size_t atom_budget = kDefaultAtomBudget);

/// Exact law of a sum of independent Bernoulli vectors; row r puts mass
/// p[r][j] on e_j and the remainder on 0.
LatticePmf bernoulli_sum_pmf(const std::vector<std::vector<double>>& p,
                             std::size_t atom_budget = kDefaultAtomBudget);

/// Relative frequencies of the rows of a batch.
LatticePmf empirical_pmf(const SampleBatch& batch);

/// Same as empirical_pmf, from rows given as counts per distinct point.
LatticePmf empirical_pmf(int dim, const std::map<LatticePoint, std::uint64_t>& counts);

void to_json(nlohmann::json& j, const LatticePmf& pmf);
LatticePmf lattice_pmf_from_json(const nlohmann::json& j);

}  // namespace pal
