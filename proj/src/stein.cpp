#include "pal/stein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/poisson.hpp"

namespace pal {

namespace {

constexpr double kLipschitzSlack = 1e-12;

void check_lipschitz(std::span<const double> g) {
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (!std::isfinite(g[i]) || !std::isfinite(g[i + 1]))
      throw ContractError("Stein: g has a non-finite value");
    if (std::abs(g[i + 1] - g[i]) > 1.0 + kLipschitzSlack)
      throw ContractError("Stein: g is not 1-Lipschitz at i = " + std::to_string(i));
  }
}

// P(P > n) / P(P = n) = sum_{k>=1} prod_{j=1..k} lambda / (n + j), for n + 1 > lambda.
double tail_to_point_ratio(double lambda, int n) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 100000; ++k) {
    term *= lambda / (n + k);
    sum += term;
    if (term <= 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double SteinSolution::max_residual() const {
  double worst = 0.0;
  for (int i = 0; i <= range(); ++i) {
    const double r = lambda * ghat_values[i + 1] - i * ghat_values[i] - g_values[i] + poisson_mean_of_g;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

SteinSolution solve_stein(double lambda, std::span<const double> g, double eps_tail) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("Stein: lambda must be finite and >= 0");
  if (g.empty()) throw ParameterError("Stein: g must have at least one value");
  check_lipschitz(g);

  const int n = static_cast<int>(g.size()) - 1;
  SteinSolution sol;
  sol.lambda = lambda;
  sol.g_values.assign(g.begin(), g.end());
  sol.ghat_values.assign(n + 2, 0.0);

  if (lambda == 0.0) {
    sol.poisson_mean_of_g = g[0];
    for (int i = 1; i <= n; ++i) sol.ghat_values[i] = (g[0] - g[i]) / i;
    sol.ghat_values[n + 1] = (g[0] - g[n]) / (n + 1);
    return sol;
  }

  // Beyond N, g is continued by the constant g(N); any other 1-Lipschitz
  // continuation moves E g(P) by at most E[(P - N)^+]. Everything is taken
  // relative to g(0), so a constant g gives ghat = 0 exactly.
  const double g0 = g[0];
  const double tail_prob = poisson_upper_tail(lambda, n);
  const double excess = poisson_excess_mean(lambda, n);
  sol.tail_bound = excess;
  if (std::abs(g[n] - g0) * tail_prob + excess > eps_tail)
    throw ContractError("Stein: range N = " + std::to_string(n) + " too short for lambda = " +
                        std::to_string(lambda) + " at eps_tail");

  const std::vector<double> pmf = poisson_pmf_table(lambda, n);
  ExactSum mean;
  for (int i = 1; i <= n; ++i) mean.add_product(g[i] - g0, pmf[i]);
  mean.add_product(g[n] - g0, tail_prob);
  const double shift = mean.value();  // E g(P) - g(0)
  sol.poisson_mean_of_g = g0 + shift;
  auto centred = [&](int i) { return (g[i] - g0) - shift; };

  auto& gh = sol.ghat_values;
  // Forward below lambda (multiplier i/lambda < 1), backward above it
  // (multiplier lambda/i < 1); rounding errors are damped in both directions.
  const int split = static_cast<int>(std::min<double>(std::floor(lambda), n + 1.0));
  for (int i = 0; i < split; ++i) gh[i + 1] = (i * gh[i] + centred(i)) / lambda;
  if (split <= n) {
    gh[n + 1] = -centred(n) * tail_to_point_ratio(lambda, n) / lambda;
    for (int i = n; i > split; --i) gh[i] = (lambda * gh[i + 1] - centred(i)) / i;
  }
  return sol;
}

int stein_range(double lambda, int support_need) {
  const double auto_range = std::ceil(lambda + 12.0 * std::sqrt(lambda) + 50.0);
  return std::max(support_need, static_cast<int>(auto_range));
}

SteinSolution solve_stein(double lambda, const std::function<double(int)>& g, int support_need,
                          double eps_tail) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("Stein: lambda must be finite and >= 0");
  const int n = stein_range(lambda, support_need);
  std::vector<double> table(n + 1);
  for (int i = 0; i <= n; ++i) table[i] = g(i);
  return solve_stein(lambda, table, eps_tail);
}

MagicFactors magic_factor_report(const SteinSolution& sol) {
  MagicFactors out;
  const auto& gh = sol.ghat_values;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    out.sup_abs = std::max(out.sup_abs, std::abs(gh[i]));
    if (i + 1 < gh.size()) out.sup_delta = std::max(out.sup_delta, std::abs(gh[i + 1] - gh[i]));
  }
  return out;
}

std::vector<double> random_lipschitz_sequence(Rng& rng, int n) {
  if (n < 0) throw ParameterError("random_lipschitz_sequence: n must be >= 0");
  auto one_shape = [&](std::vector<double>& inc) {
    const int kind = static_cast<int>(rng() % 5);
    switch (kind) {
      case 0:  // random walk
        for (auto& v : inc) v = uniform(rng, -1.0, 1.0);
        break;
      case 1:  // steepest possible steps with random signs
        for (auto& v : inc) v = (rng() & 1) ? 1.0 : -1.0;
        break;
      case 2: {  // sinusoid with slope at most 1
        const double w = uniform(rng, 0.01, 2.0);
        const double a = uniform(rng, 0.2, 1.0) * std::min(1.0, 1.0 / w) * 0.999;
        const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < inc.size(); ++i)
          inc[i] = a * (std::sin(w * (i + 1) + phase) - std::sin(w * i + phase));
        break;
      }
      case 3: {  // kink |i - c|, either orientation
        const double c = uniform(rng, 0.0, std::max(1.0, n / 4.0));
        const double s = (rng() & 1) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = s * (std::abs(i + 1.0 - c) - std::abs(i - c));
        break;
      }
      default: {  // persistent runs of slope +-1
        double s = 1.0;
        for (auto& v : inc) {
          if (uniform01(rng) < 0.1) s = -s;
          v = s * uniform(rng, 0.5, 1.0);
        }
        break;
      }
    }
  };
  std::vector<double> a(n), b(n);
  one_shape(a);
  one_shape(b);
  const double w = (rng() & 1) ? 1.0 : uniform01(rng);
  std::vector<double> g(n + 1);
  g[0] = uniform(rng, -5.0, 5.0);
  for (int i = 0; i < n; ++i) {
    double step = w * a[i] + (1.0 - w) * b[i];
    step = std::clamp(step, -1.0, 1.0);
    g[i + 1] = g[i] + step;
  }
  return g;
}

LatticeFunction::LatticeFunction(LatticePoint extent, std::vector<double> values)
    : extent_(std::move(extent)), values_(std::move(values)) {
  if (extent_.empty()) throw ParameterError("LatticeFunction: dimension must be >= 1");
  std::size_t total = 1;
  stride_.assign(extent_.size(), 0);
  for (int i = dim() - 1; i >= 0; --i) {
    if (extent_[i] < 0) throw ParameterError("LatticeFunction: negative extent");
    stride_[i] = total;
    total *= static_cast<std::size_t>(extent_[i]) + 1;
  }
  if (values_.size() != total) throw ParameterError("LatticeFunction: value count does not match box");
}

LatticeFunction LatticeFunction::tabulate(LatticePoint extent,
                                          const std::function<double(std::span<const int>)>& f) {
  std::size_t total = 1;
  for (int e : extent) {
    if (e < 0) throw ParameterError("LatticeFunction: negative extent");
    total *= static_cast<std::size_t>(e) + 1;
  }
  std::vector<double> values;
  values.reserve(total);
  LatticePoint x(extent.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    values.push_back(f(x));
    for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i) {
      if (++x[i] <= extent[i]) break;
      x[i] = 0;
    }
  }
  return LatticeFunction(std::move(extent), std::move(values));
}

double LatticeFunction::operator()(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim()) throw ParameterError("LatticeFunction: dimension mismatch");
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx += stride_[i] * static_cast<std::size_t>(std::clamp(x[i], 0, extent_[i]));
  return values_[idx];
}

bool LatticeFunction::covers(std::span<const int> x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < 0 || x[i] > extent_[i]) return false;
  return true;
}

double LatticeFunction::lipschitz_constant() const {
  double worst = 0.0;
  LatticePoint x(extent_.size(), 0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < extent_[i]) worst = std::max(worst, std::abs(values_[k + stride_[i]] - values_[k]));
    for (int i = dim() - 1; i >= 0; --i) {
      if (++x[i] <= extent_[i]) break;
      x[i] = 0;
    }
  }
  return worst;
}

LatticeFunction random_lipschitz_function(Rng& rng, const LatticePoint& extent) {
  const int d = static_cast<int>(extent.size());
  if (d == 0) throw ParameterError("random_lipschitz_function: empty extent");
  // separable part: sum of 1-Lipschitz sequences is l1-1-Lipschitz
  std::vector<std::vector<double>> parts;
  for (int i = 0; i < d; ++i) parts.push_back(random_lipschitz_sequence(rng, extent[i]));
  // max of l1 cones
  const int cones = 1 + static_cast<int>(rng() % 4);
  std::vector<std::pair<LatticePoint, double>> cone;
  for (int c = 0; c < cones; ++c) {
    LatticePoint centre(d);
    for (int i = 0; i < d; ++i) centre[i] = static_cast<int>(rng() % (extent[i] + 1));
    cone.emplace_back(centre, uniform(rng, -3.0, 3.0));
  }
  // ridge sin(w.x + phase) with max|w_i| <= 1
  std::vector<double> w(d);
  for (auto& v : w) v = uniform(rng, -1.0, 1.0);
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
  const double total = a + b + c;
  a /= total;
  b /= total;
  c /= total;
  return LatticeFunction::tabulate(extent, [&](std::span<const int> x) {
    double sep = 0.0;
    for (int i = 0; i < d; ++i) sep += parts[i][x[i]];
    double peak = -1e300;
    for (const auto& [centre, height] : cone) peak = std::max(peak, height - l1_distance(x, centre));
    double dot = phase;
    for (int i = 0; i < d; ++i) dot += w[i] * x[i];
    return a * sep + b * peak + c * std::sin(dot);
  });
}

DecompositionReport decomposition_check(const LatticePmf& x, const PoissonVectorParams& params,
                                        const LatticeFunction& g, double eps) {
  params.validate();
  const int d = params.dim();
  if (x.dim() != d || g.dim() != d) throw ParameterError("decomposition_check: dimension mismatch");
  if (x.size() == 0) throw ParameterError("decomposition_check: X has no atoms");

  // per-coordinate truncated Poisson tables, each missing at most eps/d
  std::vector<std::vector<double>> pmf(d);
  std::vector<double> tail(d), tail_moment(d);
  for (int i = 0; i < d; ++i) {
    const double lam = params.lambdas[i];
    const int top = poisson_truncation_point(lam, eps / d);
    pmf[i] = poisson_pmf_table(lam, top);
    tail[i] = poisson_upper_tail(lam, top);
    tail_moment[i] = poisson_tail_moment(lam, top);
  }

  // enumerate boxes of P_{from:d}
  auto for_each_poisson = [&](int from, auto&& body) {
    LatticePoint p(d - from, 0);
    while (true) {
      double w = 1.0;
      for (int j = from; j < d; ++j) w *= pmf[j][p[j - from]];
      body(p, w);
      int j = d - from - 1;
      for (; j >= 0; --j) {
        if (++p[j] < static_cast<int>(pmf[from + j].size())) break;
        p[j] = 0;
      }
      if (j < 0) break;
    }
  };

  DecompositionReport rep;
  const LatticePoint zero(d, 0);
  const double g0 = std::abs(g(zero));

  // left side
  CompensatedSum lhs;
  for_each_poisson(0, [&](const LatticePoint& p, double w) { lhs += w * g(p); });
  for (const auto& [pt, pr] : x.atoms()) lhs += -pr * g(pt);
  rep.lhs = lhs.value();

  double p_tail = 0.0, p_tail_moment = 0.0;
  for (int i = 0; i < d; ++i) {
    p_tail += tail[i];
    p_tail_moment += tail_moment[i];
  }
  // |g(y)| <= |g(0)| + |y|_1; a point outside the box has one coordinate beyond its cut
  double sum_lambda = 0.0;
  for (double l : params.lambdas) sum_lambda += l;
  rep.truncation = g0 * p_tail + p_tail_moment + sum_lambda * p_tail;
  rep.truncation += g0 * x.tail_mass() + x.tail_moment();

  // right side, one coordinate at a time
  CompensatedSum rhs;
  const std::vector<double> x_mean = x.mean();
  for (int i = 0; i < d; ++i) {
    const double lam = params.lambdas[i];
    const LatticePmf prefix = x.prefix_marginal(i + 1);
    const auto& atoms = prefix.atoms();
    for (auto it = atoms.begin(); it != atoms.end();) {
      // atoms sharing x_{1:i-1} are contiguous in lexicographic order
      auto end = it;
      int need = 0;
      while (end != atoms.end() && std::equal(it->first.begin(), it->first.begin() + i, end->first.begin())) {
        need = std::max(need, end->first[i] + 1);
        ++end;
      }
      LatticePoint arg(d, 0);
      std::copy(it->first.begin(), it->first.begin() + i, arg.begin());
      for_each_poisson(i + 1, [&](const LatticePoint& p, double w) {
        std::copy(p.begin(), p.end(), arg.begin() + i + 1);
        const SteinSolution sol = solve_stein(
            lam,
            [&](int k) {
              arg[i] = k;
              return g(arg);
            },
            need);
        for (auto a = it; a != end; ++a) {
          const int xi = a->first[i];
          rhs += w * a->second * (xi * sol.ghat_values[xi] - lam * sol.ghat_values[xi + 1]);
        }
      });
      it = end;
    }
    // |X_i ghat - lambda ghat| <= X_i + lambda_i
    double later_tail = 0.0;
    for (int j = i + 1; j < d; ++j) later_tail += tail[j];
    rep.truncation += (x_mean[i] + lam) * later_tail + x.tail_moment() + lam * x.tail_mass();
  }
  rep.rhs = rhs.value();
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

std::vector<SteinCheckRow> stein_check_grid(const std::vector<double>& lambdas, int g_count, int range,
                                            std::uint64_t seed, Exec exec) {
  if (g_count < 0 || range < 0) throw ParameterError("stein_check_grid: counts must be >= 0");
  std::vector<std::vector<double>> gs(g_count);
  for (int j = 0; j < g_count; ++j) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(j));
    gs[j] = random_lipschitz_sequence(rng, range);
  }
  std::vector<SteinCheckRow> rows(lambdas.size() * static_cast<std::size_t>(g_count));
  for_each_index(rows.size(), exec, [&](std::size_t k) {
    const std::size_t li = k / g_count;
    const int j = static_cast<int>(k % g_count);
    const SteinSolution sol = solve_stein(lambdas[li], gs[j]);
    const MagicFactors mf = magic_factor_report(sol);
    rows[k] = {lambdas[li], j, mf.sup_abs, mf.sup_delta, sol.max_residual()};
  });
  return rows;
}

}  // namespace pal
