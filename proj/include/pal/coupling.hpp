#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pal/lattice.hpp"

namespace pal {

/// Joint law of (X_{1:i}, Z) for coordinate i: Z is an integer displacement
/// of length i attached to X_{1:i}.
struct CouplingTable {
  using Key = std::pair<LatticePoint, LatticePoint>;  // (x_{1:i}, z)

  int dim = 1;
  std::map<Key, double> joint;
  /// Mass of X_{1:i} left out of the table (truncated laws); the q-terms of
  /// the missing part are bounded separately by the caller.
  double tail_mass = 0.0;

  void validate() const;
  /// Law of X_{1:i} implied by the table.
  LatticePmf x_marginal() const;
  /// E|Z_j| for j in 0..i-1.
  std::vector<double> abs_z_means() const;
  /// P(Z_{1:i-1} != 0).
  double prob_leading_nonzero() const;

  /// Z = 0.
  static CouplingTable zero(const LatticePmf& x_prefix);
  /// Z = phi(X_{1:i}).
  template <class F>
  static CouplingTable deterministic(const LatticePmf& x_prefix, F&& phi) {
    CouplingTable t;
    t.dim = x_prefix.dim();
    t.tail_mass = x_prefix.tail_mass();
    for (const auto& [x, p] : x_prefix.atoms()) t.joint[{x, phi(x)}] += p;
    return t;
  }
};

/// Terms m_i P(X_{1:i} = m) - lambda_i P(X_{1:i} + Z = (m_{1:i-1}, m_i - 1)) for m_i >= 1.
struct QTermTable {
  int dim = 1;
  std::map<LatticePoint, double> terms;

  double abs_sum() const;
  double max_abs() const;
};

/// Evaluates the q-terms from the joint table. Pairs with X_{1:i} + Z outside
/// N_0^i never match a key and are dropped, exactly as the definition reads.
QTermTable q_terms_from_coupling(const LatticePmf& x_prefix, double lambda_i, const CouplingTable& coupling);

struct CouplingBoundTerms {
  std::vector<double> own_shift;    // lambda_i E|Z_i|
  std::vector<double> cross_shift;  // 2 lambda_i sum_{j<i} E|Z_j|, or 2 lambda_i P(Z_{1:i-1} != 0)
  std::vector<double> q_sum;        // sum_m |q_m|
  double total = 0.0;
};

/// The coupling bound on d_W(X, P) for X = marginal of couplings.back().
CouplingBoundTerms coupling_bound_terms(const PoissonVectorParams& lambdas, const std::vector<CouplingTable>& couplings,
                                  bool improved);
double coupling_bound(const PoissonVectorParams& lambdas, const std::vector<CouplingTable>& couplings,
                      bool improved = false);

struct SizeBiasReport {
  /// max over i and points a of |a_i P(X_{1:i}=a) - E[X_i] P(Y^{(i)}=a)|.
  double max_defect = 0.0;
  /// Premises of the size-bias reading: all q-terms zero and E[X_i] = lambda_i.
  double max_q_term = 0.0;
  double max_mean_gap = 0.0;
};

/// Checks E[X_i f(X_{1:i})] = E[X_i] E[f(Y^{(i)})], Y^{(i)} = (X_{1:i-1}, X_i + 1) + Z^{(i)},
/// on every indicator f of a point of the combined support.
SizeBiasReport size_bias_check(const LatticePmf& x, const PoissonVectorParams& lambdas,
                               const std::vector<CouplingTable>& couplings);

}  // namespace pal
