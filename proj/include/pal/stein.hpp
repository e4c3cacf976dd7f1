#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pal/lattice.hpp"
#include "pal/parallel.hpp"
#include "pal/rng.hpp"

namespace pal {

/// Solution of  lambda*ghat(i+1) - i*ghat(i) = g(i) - E g(P_lambda),  ghat(0) = 0.
///
/// g is known on 0..N and extended beyond N by the constant g(N) (still
/// 1-Lipschitz); ghat is stored on 0..N+1.
struct SteinSolution {
  double lambda = 0.0;
  std::vector<double> g_values;
  std::vector<double> ghat_values;
  double poisson_mean_of_g = 0.0;
  /// Bound on the contribution of i > N to E g(P_lambda) for any 1-Lipschitz continuation.
  double tail_bound = 0.0;

  int range() const { return static_cast<int>(g_values.size()) - 1; }
  /// max_i |lambda ghat(i+1) - i ghat(i) - g(i) + E g(P_lambda)| over i in 0..N.
  double max_residual() const;
};

/// Solves the Stein equation for a tabulated 1-Lipschitz g on 0..N.
///
/// Values are produced by the forward recursion below lambda and by the
/// backward recursion above it; each direction only ever shrinks rounding
/// errors, so the magic-factor bounds survive in floating point.
SteinSolution solve_stein(double lambda, std::span<const double> g, double eps_tail = 1e-13);

/// Range used when the solver picks N itself.
int stein_range(double lambda, int support_need);

/// Tabulates g on 0..stein_range(lambda, support_need) and solves.
SteinSolution solve_stein(double lambda, const std::function<double(int)>& g, int support_need,
                          double eps_tail = 1e-13);

struct MagicFactors {
  double sup_abs = 0.0;    // sup_i |ghat(i)|
  double sup_delta = 0.0;  // sup_i |ghat(i+1) - ghat(i)|
};

MagicFactors magic_factor_report(const SteinSolution& sol);

/// Random 1-Lipschitz sequence on 0..n (mixtures of walks, ramps, kinks and sinusoids).
std::vector<double> random_lipschitz_sequence(Rng& rng, int n);

/// Real function on N_0^d tabulated on the box [0, extent_1] x ... x [0, extent_d];
/// arguments outside the box are clamped onto it, which keeps the l1-Lipschitz constant.
class LatticeFunction {
 public:
  LatticeFunction(LatticePoint extent, std::vector<double> values);

  static LatticeFunction tabulate(LatticePoint extent, const std::function<double(std::span<const int>)>& f);

  int dim() const { return static_cast<int>(extent_.size()); }
  const LatticePoint& extent() const { return extent_; }
  double operator()(std::span<const int> x) const;
  bool covers(std::span<const int> x) const;
  /// max |g(x + e_i) - g(x)| over the box, the l1-Lipschitz constant.
  double lipschitz_constant() const;

 private:
  LatticePoint extent_;
  std::vector<std::size_t> stride_;
  std::vector<double> values_;
};

/// Random 1-Lipschitz function on the given box: a convex mixture of a
/// separable walk and a max of l1-cones.
LatticeFunction random_lipschitz_function(Rng& rng, const LatticePoint& extent);

struct DecompositionReport {
  double lhs = 0.0;        // E[g(P) - g(X)]
  double rhs = 0.0;        // sum of the per-coordinate Stein terms
  double residual = 0.0;   // |lhs - rhs|
  double truncation = 0.0; // bound on the effect of truncating P
};

/// Evaluates both sides of the telescoping Stein decomposition of E[g(P) - g(X)]
/// by exhaustive summation over the supports of X and of a truncated P.
DecompositionReport decomposition_check(const LatticePmf& x, const PoissonVectorParams& params,
                                        const LatticeFunction& g, double eps = 1e-15);

/// Row of a stein-check sweep.
struct SteinCheckRow {
  double lambda = 0.0;
  int g_id = 0;
  double sup_abs = 0.0;
  double sup_delta = 0.0;
  double residual = 0.0;
};

/// Solves every (lambda, g) pair of a grid; g number j is drawn from stream j of `seed`.
std::vector<SteinCheckRow> stein_check_grid(const std::vector<double>& lambdas, int g_count, int range,
                                            std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace pal
