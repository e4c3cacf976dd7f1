#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pal/lattice.hpp"
#include "pal/parallel.hpp"
#include "pal/rng.hpp"

namespace pal {

using ProbMatrix = std::vector<std::vector<double>>;

/// Rule turning a shared i.i.d. uniform sequence U_1, U_2, ... into outcomes
/// Y^{(r)} in {0, e_1, ..., e_d}; index r reads U_r, ..., U_{r+span-1}.
class WindowSampler {
 public:
  virtual ~WindowSampler() = default;
  virtual int span() const = 0;
  /// 0 for the zero vector, j in 1..d for e_j; u holds U_r..U_{r+span-1}.
  virtual int outcome(int r, std::span<const double> u) const = 0;
  /// P(Y^{(r)} = e_j), j in 1..d, as realised by the rule.
  virtual double marginal(int r, int j) const = 0;
  /// P(Y^{(k)} = e_i, Y^{(r)} = e_j) when known in closed form.
  virtual std::optional<double> joint(int, int, int, int) const { return std::nullopt; }
  virtual nlohmann::json params() const = 0;
};

/// Y^{(r)} = e_j iff min(U_r, ..., U_{r+w-1}) lies in the j-th of d consecutive
/// intervals of [0,1), calibrated through P(min > s) = (1 - s)^w. Indices more
/// than w - 1 apart share no uniforms; w = 1 gives independent vectors.
class SlidingMinSampler final : public WindowSampler {
 public:
  SlidingMinSampler(const ProbMatrix& p, int window);
  int span() const override { return window_; }
  int outcome(int r, std::span<const double> u) const override;
  double marginal(int r, int j) const override;
  std::optional<double> joint(int k, int i, int r, int j) const override;
  nlohmann::json params() const override;

 private:
  double survival(int gap, double x, double y) const;
  int window_;
  int d_;
  std::vector<std::vector<double>> cuts_;  // per row: 0 = a_0 < a_1 <= ... <= a_d
};

/// Array of n Bernoulli vectors in N_0^d with row probabilities p and
/// dependence range m; the sampler realises the joint law.
struct BernoulliArrayModel {
  int n = 0;
  int d = 0;
  int m = 0;
  ProbMatrix p;
  std::shared_ptr<const WindowSampler> sampler;

  void validate() const;
  /// lambda_j = sum_r p_{r,j}
  PoissonVectorParams lambdas() const;
};

/// Shipped family: sliding minimum with window length `window` (default m + 1).
BernoulliArrayModel make_sliding_min_model(ProbMatrix p, int m, int window = -1);

/// Model from {"n","d","p","m","family_params":{"kind":"sliding_min","window":w}}.
BernoulliArrayModel bernoulli_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BernoulliArrayModel& model);

void validate_prob_matrix(const ProbMatrix& p);

/// sum_k (sum_i p_{k,i})^2, correctly rounded.
double corollary_bound(const ProbMatrix& p);

struct QValue {
  double value = 0.0;
  double std_error = 0.0;  // 0 when exact
  bool exact = true;
};

struct QOptions {
  std::uint64_t mc_samples = 200000;  // used only without closed-form joints
  std::uint64_t seed = 1;
};

/// Q(k), k in 1..n: max over 1 <= |k - r| <= m and i, j of P(Y^{(k)} = e_i, Y^{(r)} = e_j); 0 for an empty range.
QValue q_factor(const BernoulliArrayModel& model, int k, const QOptions& opt = {});
std::vector<QValue> q_factors(const BernoulliArrayModel& model, const QOptions& opt = {}, Exec exec = Exec::kParallel);

/// Bound on d_W(sum_r Y^{(r)}, P) for the m-dependent array. The additions run
/// through an exact accumulator, so for m = 0 the result equals corollary_bound bit for bit.
double mdep_bound(const BernoulliArrayModel& model, const std::vector<QValue>& q);
double mdep_bound(const BernoulliArrayModel& model);

/// Outcomes Y^{(1)}, ..., Y^{(n)} (0 or j in 1..d) of one draw of the array.
std::vector<int> sample_mdep_outcomes(const BernoulliArrayModel& model, Rng& rng);
/// Each Y^{(r)} as a d-vector.
std::vector<LatticePoint> sample_mdep_array(const BernoulliArrayModel& model, std::uint64_t seed);
/// Rows of X = sum_r Y^{(r)}; replicate t uses stream t of `seed`.
SampleBatch sample_mdep_sums(const BernoulliArrayModel& model, std::uint64_t count, std::uint64_t seed,
                             Exec exec = Exec::kParallel);

struct EmpiricalDistance {
  double value = 0.0;             // d_W(empirical law of the rows, Poisson(lambdas))
  double std_error = 0.0;         // bootstrap over the rows
  double truncation_error = 0.0;  // from truncating the Poisson side
};

/// Plug-in d_W between the rows of `batch` and the Poisson vector law, with a
/// bootstrap standard error (resample b uses stream b of `seed`).
EmpiricalDistance empirical_poisson_distance(const SampleBatch& batch, const PoissonVectorParams& lambdas,
                                             int bootstrap, std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace pal
