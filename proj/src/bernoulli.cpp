#include "pal/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/stats.hpp"
#include "pal/transport.hpp"

namespace pal {

namespace {

constexpr double kRowSumSlack = 1e-12;
constexpr double kMarginalTolerance = 1e-12;

}  // namespace

void validate_prob_matrix(const ProbMatrix& p) {
  if (p.empty()) throw ParameterError("probability matrix has no rows");
  const std::size_t d = p.front().size();
  if (d == 0) throw ParameterError("probability matrix has no columns");
  for (const auto& row : p) {
    if (row.size() != d) throw ParameterError("probability matrix is ragged");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("probability outside [0,1]");
      s += v;
    }
    if (s > 1.0 + kRowSumSlack) throw ParameterError("probability row sums to more than 1");
  }
}

SlidingMinSampler::SlidingMinSampler(const ProbMatrix& p, int window) : window_(window) {
  validate_prob_matrix(p);
  if (window < 1) throw ParameterError("sliding_min: window must be >= 1");
  d_ = static_cast<int>(p.front().size());
  // cuts_ holds (1 - a_j) = (1 - c_j)^{1/w}, c_j the cumulative row sum
  cuts_.resize(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) {
    auto& s = cuts_[r];
    s.resize(d_ + 1);
    s[0] = 1.0;
    double c = 0.0;
    for (int j = 1; j <= d_; ++j) {
      c += p[r][j - 1];
      s[j] = std::pow(std::max(0.0, 1.0 - c), 1.0 / window_);
    }
  }
}

int SlidingMinSampler::outcome(int r, std::span<const double> u) const {
  double mn = 1.0;
  for (int t = 0; t < window_; ++t) mn = std::min(mn, u[t]);
  const double up = 1.0 - mn;  // M >= a_j  <=>  1 - M <= 1 - a_j
  const auto& s = cuts_[r];
  for (int j = 1; j <= d_; ++j)
    if (up > s[j]) return j;
  return 0;
}

double SlidingMinSampler::marginal(int r, int j) const {
  const auto& s = cuts_[r];
  return std::pow(s[j - 1], window_) - std::pow(s[j], window_);
}

double SlidingMinSampler::survival(int gap, double x, double y) const {
  // P(M_k >= 1 - x, M_r >= 1 - y) with windows sharing window - gap uniforms
  return std::pow(x, gap) * std::pow(y, gap) * std::pow(std::min(x, y), window_ - gap);
}

std::optional<double> SlidingMinSampler::joint(int k, int i, int r, int j) const {
  if (k == r) return i == j ? marginal(k, i) : 0.0;
  if (k > r) {
    std::swap(k, r);
    std::swap(i, j);
  }
  const int gap = r - k;
  if (gap >= window_) return marginal(k, i) * marginal(r, j);
  const auto& s = cuts_[k];
  const auto& t = cuts_[r];
  const double v = survival(gap, s[i - 1], t[j - 1]) - survival(gap, s[i], t[j - 1]) -
                   survival(gap, s[i - 1], t[j]) + survival(gap, s[i], t[j]);
  return std::max(0.0, v);
}

nlohmann::json SlidingMinSampler::params() const { return {{"kind", "sliding_min"}, {"window", window_}}; }

void BernoulliArrayModel::validate() const {
  if (n < 1 || d < 1) throw ParameterError("Bernoulli array: n and d must be >= 1");
  if (m < 0) throw ParameterError("Bernoulli array: m must be >= 0");
  if (static_cast<int>(p.size()) != n) throw ParameterError("Bernoulli array: p must have n rows");
  validate_prob_matrix(p);
  if (static_cast<int>(p.front().size()) != d) throw ParameterError("Bernoulli array: p must have d columns");
  if (!sampler) throw ParameterError("Bernoulli array: no sampler");
  if (sampler->span() - 1 > m)
    throw ParameterError("Bernoulli array: sampler couples indices further apart than m");
  for (int r = 0; r < n; ++r)
    for (int j = 1; j <= d; ++j)
      if (std::abs(sampler->marginal(r, j) - p[r][j - 1]) > kMarginalTolerance)
        throw ContractError("Bernoulli array: sampler marginals do not reproduce p");
}

PoissonVectorParams BernoulliArrayModel::lambdas() const {
  PoissonVectorParams out;
  out.lambdas.assign(d, 0.0);
  for (int j = 0; j < d; ++j) {
    ExactSum s;
    for (int r = 0; r < n; ++r) s += p[r][j];
    out.lambdas[j] = s.value();
  }
  return out;
}

BernoulliArrayModel make_sliding_min_model(ProbMatrix p, int m, int window) {
  validate_prob_matrix(p);
  if (m < 0) throw ParameterError("Bernoulli array: m must be >= 0");
  if (window < 0) window = m + 1;
  BernoulliArrayModel model;
  model.n = static_cast<int>(p.size());
  model.d = static_cast<int>(p.front().size());
  model.m = m;
  model.sampler = std::make_shared<SlidingMinSampler>(p, window);
  model.p = std::move(p);
  model.validate();
  return model;
}

BernoulliArrayModel bernoulli_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("Bernoulli model must be a JSON object");
  for (const auto& [key, v] : j.items())
    if (key != "n" && key != "d" && key != "p" && key != "m" && key != "family_params" && key != "schema_version")
      throw ParameterError("Bernoulli model: unknown key '" + key + "'");
  for (const char* key : {"n", "d", "p", "m"})
    if (!j.contains(key)) throw ParameterError(std::string("Bernoulli model: missing key '") + key + "'");
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  const int m = j.at("m").get<int>();
  ProbMatrix p = j.at("p").get<ProbMatrix>();
  if (static_cast<int>(p.size()) != n || p.empty() || static_cast<int>(p.front().size()) != d)
    throw ParameterError("Bernoulli model: p must be an n x d matrix");
  int window = m + 1;
  if (j.contains("family_params")) {
    const auto& fp = j.at("family_params");
    if (!fp.is_object()) throw ParameterError("family_params must be an object");
    for (const auto& [key, v] : fp.items())
      if (key != "kind" && key != "window") throw ParameterError("family_params: unknown key '" + key + "'");
    if (fp.contains("kind") && fp.at("kind").get<std::string>() != "sliding_min")
      throw ParameterError("family_params: only kind 'sliding_min' is available");
    if (fp.contains("window")) window = fp.at("window").get<int>();
  }
  return make_sliding_min_model(std::move(p), m, window);
}

nlohmann::json to_json(const BernoulliArrayModel& model) {
  return {{"n", model.n}, {"d", model.d}, {"m", model.m}, {"p", model.p}, {"family_params", model.sampler->params()}};
}

double corollary_bound(const ProbMatrix& p) {
  validate_prob_matrix(p);
  // (sum_i p_i)^2 expanded into products so the sum is exact before the single rounding
  ExactSum acc;
  for (const auto& row : p)
    for (std::size_t i = 0; i < row.size(); ++i)
      for (std::size_t j = 0; j < row.size(); ++j) acc.add_product(row[i], row[j]);
  return acc.value();
}

QValue q_factor(const BernoulliArrayModel& model, int k, const QOptions& opt) {
  if (k < 1 || k > model.n) throw ParameterError("Q: index k out of range");
  const int k0 = k - 1;
  const int lo = std::max(0, k0 - model.m);
  const int hi = std::min(model.n - 1, k0 + model.m);
  if (lo == hi) return {};

  bool closed = model.sampler->joint(k0, 1, k0 == lo ? hi : lo, 1).has_value();
  if (closed) {
    double best = 0.0;
    for (int r = lo; r <= hi; ++r) {
      if (r == k0) continue;
      for (int i = 1; i <= model.d; ++i)
        for (int j = 1; j <= model.d; ++j) best = std::max(best, *model.sampler->joint(k0, i, r, j));
    }
    return {best, 0.0, true};
  }

  // Monte Carlo over whole draws of the array
  const int width = hi - lo + 1;
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(width) * model.d * model.d, 0);
  Rng rng = make_stream(opt.seed, static_cast<std::uint64_t>(k));
  for (std::uint64_t t = 0; t < opt.mc_samples; ++t) {
    const std::vector<int> y = sample_mdep_outcomes(model, rng);
    if (y[k0] == 0) continue;
    for (int r = lo; r <= hi; ++r)
      if (r != k0 && y[r] != 0) ++hits[(static_cast<std::size_t>(r - lo) * model.d + (y[k0] - 1)) * model.d + (y[r] - 1)];
  }
  const std::uint64_t top = *std::max_element(hits.begin(), hits.end());
  const double est = static_cast<double>(top) / static_cast<double>(opt.mc_samples);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(opt.mc_samples)), false};
}

std::vector<QValue> q_factors(const BernoulliArrayModel& model, const QOptions& opt, Exec exec) {
  model.validate();
  std::vector<QValue> out(model.n);
  for_each_index(out.size(), exec, [&](std::size_t k) { out[k] = q_factor(model, static_cast<int>(k) + 1, opt); });
  return out;
}

double mdep_bound(const BernoulliArrayModel& model, const std::vector<QValue>& q) {
  model.validate();
  if (static_cast<int>(q.size()) != model.n) throw ParameterError("mdep_bound: need one Q value per index");
  const int n = model.n, d = model.d, m = model.m;
  const auto& p = model.p;
  ExactSum acc;
  // k outer, i inner, r innermost; every addend is an exact product
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - m), hi = std::min(n - 1, k + m);
    for (int i = 0; i < d; ++i) {
      for (int r = lo; r <= hi; ++r) acc.add_product(p[r][i], p[k][i]);
      for (int j = 0; j < i; ++j)
        for (int r = lo; r <= hi; ++r) acc.add_product(2.0 * p[r][j], p[k][i]);
    }
  }
  const double factor = 2.0 * d * (d + 1.0) * m;
  for (int k = 0; k < n; ++k) acc.add_product(factor, q[k].value);
  return acc.value();
}

double mdep_bound(const BernoulliArrayModel& model) { return mdep_bound(model, q_factors(model)); }

std::vector<int> sample_mdep_outcomes(const BernoulliArrayModel& model, Rng& rng) {
  const int w = model.sampler->span();
  std::vector<double> u(static_cast<std::size_t>(model.n + w - 1));
  for (auto& v : u) v = uniform01(rng);
  std::vector<int> y(model.n);
  for (int r = 0; r < model.n; ++r) y[r] = model.sampler->outcome(r, std::span<const double>(u).subspan(r, w));
  return y;
}

std::vector<LatticePoint> sample_mdep_array(const BernoulliArrayModel& model, std::uint64_t seed) {
  model.validate();
  Rng rng = make_stream(seed, 0);
  const std::vector<int> y = sample_mdep_outcomes(model, rng);
  std::vector<LatticePoint> out(model.n, LatticePoint(model.d, 0));
  for (int r = 0; r < model.n; ++r)
    if (y[r] > 0) out[r][y[r] - 1] = 1;
  return out;
}

SampleBatch sample_mdep_sums(const BernoulliArrayModel& model, std::uint64_t count, std::uint64_t seed, Exec exec) {
  model.validate();
  SampleBatch batch;
  batch.dim = model.d;
  batch.seed = seed;
  batch.rows.assign(count, LatticePoint(model.d, 0));
  for_each_index(count, exec, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    for (int v : sample_mdep_outcomes(model, rng))
      if (v > 0) ++batch.rows[t][v - 1];
  });
  return batch;
}

EmpiricalDistance empirical_poisson_distance(const SampleBatch& batch, const PoissonVectorParams& lambdas,
                                             int bootstrap, std::uint64_t seed, Exec exec) {
  batch.validate();
  if (batch.dim != lambdas.dim()) throw ParameterError("empirical distance: sample and Poisson dimensions differ");
  if (batch.count() < 2) throw ParameterError("empirical distance: need at least two rows");
  const LatticePmf target = poisson_vector_pmf(lambdas, 1e-12);
  EmpiricalDistance out;
  const DistanceResult w = wasserstein_l1(empirical_pmf(batch), target);
  out.value = w.value;
  out.truncation_error = w.truncation_error;
  if (bootstrap < 2) return out;
  std::vector<double> resampled(bootstrap);
  for_each_index(static_cast<std::size_t>(bootstrap), exec, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    std::map<LatticePoint, std::uint64_t> counts;
    for (std::size_t t = 0; t < batch.count(); ++t) ++counts[batch.rows[rng() % batch.count()]];
    resampled[b] = wasserstein_l1(empirical_pmf(batch.dim, counts), target).value;
  });
  out.std_error = sample_sd(resampled);
  return out;
}

}  // namespace pal
