#include "pal/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pal/errors.hpp"
#include "pal/quadrature.hpp"
#include "pal/stats.hpp"

namespace pal {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double interval_length(double lo, double hi) { return std::max(0.0, hi - lo); }

// y -> c + s * y
struct Line {
  double c, s;
  double operator()(double y) const { return c + s * y; }
};

// int_{y0}^{y1} (min_j hi_j(y) - max_i lo_i(y))_+ dy; the integrand is linear
// between pairwise crossings, where the midpoint rule is exact
double overlap_integral(const std::vector<Line>& lo, const std::vector<Line>& hi, double y0, double y1) {
  if (!(y1 > y0)) return 0.0;
  std::vector<Line> all(lo);
  all.insert(all.end(), hi.begin(), hi.end());
  std::vector<double> cuts{y0, y1};
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].s == all[j].s) continue;
      const double y = (all[j].c - all[i].c) / (all[i].s - all[j].s);
      if (y > y0 && y < y1) cuts.push_back(y);
    }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double y = 0.5 * (cuts[k] + cuts[k + 1]);
    double l = -std::numeric_limits<double>::infinity(), h = std::numeric_limits<double>::infinity();
    for (const Line& f : lo) l = std::max(l, f(y));
    for (const Line& f : hi) h = std::min(h, f(y));
    acc += (cuts[k + 1] - cuts[k]) * interval_length(l, h);
  }
  return acc;
}

class IdentityModel final : public UStatModel {
 public:
  explicit IdentityModel(IntensityMeasure mu) : mu_(std::move(mu)) {
    if (!std::holds_alternative<Box>(mu_.window())) throw ParameterError("identity model: base must live on a box");
    y_ = std::get<Box>(mu_.window());
  }
  int order() const override { return 1; }
  const IntensityMeasure& base() const override { return mu_; }
  const Box& y_window() const override { return y_; }
  bool in_domain(std::span<const Point>) const override { return true; }
  Point kernel(std::span<const Point> x) const override { return x[0]; }
  double intensity(const Box& a) const override { return mu_.measure(a); }
  nlohmann::json to_json() const override { return {{"kind", "identity"}, {"base", mu_.to_json()}}; }

 private:
  IntensityMeasure mu_;
  Box y_;
};

class IntervalPairModel final : public UStatModel {
 public:
  IntervalPairModel(double t, double delta)
      : t_(t), delta_(delta), mu_(IntensityMeasure::constant(Box::unit(1), t)), y_(Box::unit(1)) {
    if (!(t >= 0.0) || !(delta >= 0.0) || !std::isfinite(t) || !std::isfinite(delta))
      throw ParameterError("interval model: t and delta must be finite and >= 0");
  }
  int order() const override { return 2; }
  const IntensityMeasure& base() const override { return mu_; }
  const Box& y_window() const override { return y_; }
  bool in_domain(std::span<const Point> x) const override { return std::abs(x[0][0] - x[1][0]) <= delta_; }
  Point kernel(std::span<const Point> x) const override { return {0.5 * (x[0][0] + x[1][0])}; }
  double last_section(std::span<const Point> prefix) const override {
    const double x = prefix[0][0];
    return t_ * interval_length(std::max(x - delta_, 0.0), std::min(x + delta_, 1.0));
  }
  std::vector<double> section_breaks(std::span<const Point>) const override { return {delta_, 1.0 - delta_}; }
  double intensity(const Box& a) const override {
    // density t^2 min(delta, 2u, 2 - 2u) is piecewise linear: midpoint rule per piece is exact
    const double lo = std::max(a.lo[0], 0.0), hi = std::min(a.hi[0], 1.0);
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double c : {delta_ / 2.0, 0.5, 1.0 - delta_ / 2.0})
      if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double u = 0.5 * (cuts[k] + cuts[k + 1]);
      acc += (cuts[k + 1] - cuts[k]) * std::min({delta_, 2.0 * u, 2.0 - 2.0 * u});
    }
    return t_ * t_ * acc;
  }
  nlohmann::json to_json() const override { return {{"kind", "interval_pair"}, {"t", t_}, {"delta", delta_}}; }

 private:
  double t_, delta_;
  IntensityMeasure mu_;
  Box y_;
};

class ClusterTripleModel final : public UStatModel {
 public:
  ClusterTripleModel(double t, double delta)
      : t_(t), delta_(delta), mu_(IntensityMeasure::constant(Box::unit(1), t)), y_(Box::unit(1)) {
    if (!(t >= 0.0) || !(delta >= 0.0) || !std::isfinite(t) || !std::isfinite(delta))
      throw ParameterError("triple model: t and delta must be finite and >= 0");
  }
  int order() const override { return 3; }
  const IntensityMeasure& base() const override { return mu_; }
  const Box& y_window() const override { return y_; }
  bool in_domain(std::span<const Point> x) const override {
    const auto [mn, mx] = std::minmax({x[0][0], x[1][0], x[2][0]});
    return mx - mn <= delta_;
  }
  Point kernel(std::span<const Point> x) const override { return {(x[0][0] + x[1][0] + x[2][0]) / 3.0}; }
  double last_section(std::span<const Point> prefix) const override {
    const double x = prefix[0][0], y = prefix[1][0];
    return t_ * interval_length(std::max(std::max(x, y) - delta_, 0.0), std::min(std::min(x, y) + delta_, 1.0));
  }
  std::vector<double> section_breaks(std::span<const Point> prefix) const override {
    std::vector<double> b;
    for (int m = 1; m <= 3; ++m) {
      b.push_back(m * delta_);
      b.push_back(1.0 - m * delta_);
    }
    for (const Point& p : prefix)
      for (int m = -2; m <= 2; ++m) b.push_back(p[0] + m * delta_);
    return b;
  }
  double intensity(const Box& a) const override {
    const double alo = a.lo[0], ahi = a.hi[0];
    // (t^3/6) int int |{z : (x,y,z) in D, (x+y+z)/3 in A}| dx dy; the inner
    // length is piecewise linear in y and is integrated exactly
    auto inner = [&](double x) {
      const std::vector<Line> lo{{x - delta_, 0.0}, {-delta_, 1.0}, {0.0, 0.0}, {3.0 * alo - x, -1.0}};
      const std::vector<Line> hi{{x + delta_, 0.0}, {delta_, 1.0}, {1.0, 0.0}, {3.0 * ahi - x, -1.0}};
      return overlap_integral(lo, hi, std::max(0.0, x - delta_), std::min(1.0, x + delta_));
    };
    std::vector<double> breaks{delta_, 1.0 - delta_, 2.0 * delta_, 1.0 - 2.0 * delta_};
    for (double c : {alo, ahi})
      for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) breaks.push_back(c + m * delta_ / 3.0);
    return t_ * t_ * t_ / 6.0 * integrate(inner, 0.0, 1.0, 1e-12, 1e-15, breaks).value;
  }
  nlohmann::json to_json() const override { return {{"kind", "cluster_triple"}, {"t", t_}, {"delta", delta_}}; }

 private:
  double t_, delta_;
  IntensityMeasure mu_;
  Box y_;
};

// calls f on every k-subset (as sorted index list) of {0, ..., n-1}
template <class F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

double UStatModel::last_section(std::span<const Point>) const {
  throw ParameterError("U-statistic model has no section measure");
}

std::vector<Point> UStatModel::fallback_tuple() const {
  const Box& w = std::get<Box>(base().window());
  return std::vector<Point>(order(), w.lo);
}

std::shared_ptr<const UStatModel> make_identity_model(IntensityMeasure mu) {
  return std::make_shared<IdentityModel>(std::move(mu));
}

std::shared_ptr<const UStatModel> make_interval_pair_model(double t, double delta) {
  return std::make_shared<IntervalPairModel>(t, delta);
}

std::shared_ptr<const UStatModel> make_cluster_triple_model(double t, double delta) {
  return std::make_shared<ClusterTripleModel>(t, delta);
}

std::shared_ptr<const UStatModel> ustat_model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParameterError("U-statistic model: need an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (!j.contains(k)) throw ParameterError(std::string("U-statistic model: missing key '") + k + "'");
    for (const auto& [k, v] : j.items())
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
        throw ParameterError("U-statistic model: unknown key '" + k + "'");
  };
  if (kind == "identity") {
    allow({"kind", "base"});
    return make_identity_model(IntensityMeasure::from_json(j.at("base")));
  }
  if (kind == "interval_pair") {
    allow({"kind", "t", "delta"});
    return make_interval_pair_model(j.at("t").get<double>(), j.at("delta").get<double>());
  }
  if (kind == "cluster_triple") {
    allow({"kind", "t", "delta"});
    return make_cluster_triple_model(j.at("t").get<double>(), j.at("delta").get<double>());
  }
  throw ParameterError("U-statistic model: unknown kind '" + kind + "'");
}

double ustat_symmetry_defect(const UStatModel& model, Rng& rng, int trials) {
  const int k = model.order();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Point> x(k);
    for (auto& p : x) p = sample_point(model.base(), rng);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    const bool in = model.in_domain(x);
    const Point g = in ? model.kernel(x) : Point{};
    while (std::next_permutation(perm.begin(), perm.end())) {
      std::vector<Point> y(k);
      for (int i = 0; i < k; ++i) y[i] = x[perm[i]];
      if (model.in_domain(y) != in) return std::numeric_limits<double>::infinity();
      if (!in) continue;
      const Point h = model.kernel(y);
      for (std::size_t a = 0; a < g.size(); ++a) worst = std::max(worst, std::abs(g[a] - h[a]));
    }
  }
  return worst;
}

PointPattern build_ustat_process(const PointPattern& points, const UStatModel& model) {
  const int k = model.order();
  const int n = static_cast<int>(points.size());
  double tuples = 1.0;
  for (int i = 0; i < k; ++i) tuples *= static_cast<double>(n - i) / (i + 1);
  if (tuples > kMaxTuples) throw CapacityError("U-statistic process: too many tuples to enumerate");
  PointPattern out;
  std::vector<Point> tuple(k);
  for_each_subset(n, k, [&](const std::vector<int>& idx) {
    for (int i = 0; i < k; ++i) tuple[i] = points.points[idx[i]];
    // k! ordered tuples, weight 1/k! each: one atom per subset
    if (model.in_domain(tuple)) out.points.push_back(model.kernel(tuple));
  });
  return out;
}

RValue ustat_R(const UStatModel& model) {
  const int k = model.order();
  RValue out;
  if (k == 1) return out;
  if (!std::holds_alternative<Box>(model.base().window()) || std::get<Box>(model.base().window()).dim() != 1)
    throw ParameterError("R functional: quadrature needs a one-dimensional X window");
  const Box& w = std::get<Box>(model.base().window());
  const IntensityMeasure& mu = model.base();
  auto mu_density = [&](double x) { return mu.density(std::span<const double>(&x, 1)); };
  double worst_inner = 0.0;

  // int_{X^{k-1-|prefix|}} 1_D dmu for a prefix of length >= 1
  std::function<double(std::vector<Point>&)> section = [&](std::vector<Point>& prefix) -> double {
    if (static_cast<int>(prefix.size()) == k - 1) return model.last_section(prefix);
    const QuadResult q = integrate(
        [&](double y) {
          prefix.push_back(Point{y});
          const double v = section(prefix) * mu_density(y);
          prefix.pop_back();
          return v;
        },
        w.lo[0], w.hi[0], 1e-11, 1e-15, model.section_breaks(prefix));
    worst_inner = std::max(worst_inner, q.error);
    return q.value;
  };

  // int_{X^i} section^2 dmu^i
  std::function<QuadResult(std::vector<Point>&, int)> outer = [&](std::vector<Point>& prefix, int i) -> QuadResult {
    return integrate(
        [&](double x) {
          prefix.push_back(Point{x});
          double v;
          if (static_cast<int>(prefix.size()) == i) {
            const double s = section(prefix);
            v = s * s;
          } else {
            const QuadResult q = outer(prefix, i);
            worst_inner = std::max(worst_inner, q.error);
            v = q.value;
          }
          prefix.pop_back();
          return v * mu_density(x);
        },
        w.lo[0], w.hi[0], 1e-11, 1e-15, model.section_breaks(prefix));
  };

  const double mass = mu.total();
  for (int i = 1; i < k; ++i) {
    std::vector<Point> prefix;
    worst_inner = 0.0;
    const QuadResult r = outer(prefix, i);
    // inner errors enter squared sections at most linearly: |s^2 - s'^2| <= (2 s_max + e) e
    const double s_max = std::pow(mass, k - i);
    const double err = r.error + std::pow(mass, i) * (2.0 * s_max + worst_inner) * worst_inner;
    out.per_split.push_back(r.value);
    if (r.value >= out.value) {
      out.value = r.value;
      out.error = err;
    }
  }
  return out;
}

UStatBound ustat_bound(const UStatModel& model) {
  UStatBound b;
  b.r = ustat_R(model);
  const int k = model.order();
  const double c = std::pow(2.0, k + 1) / factorial(k);
  b.value = c * b.r.value;
  b.error = c * b.r.error;
  return b;
}

std::vector<Point> sample_xA(const UStatModel& model, const Box& a, Rng& rng, long max_attempts) {
  if (!(model.intensity(a) > 0.0)) return model.fallback_tuple();
  const int k = model.order();
  std::vector<Point> x(k);
  for (long t = 0; t < max_attempts; ++t) {
    for (auto& p : x) p = sample_point(model.base(), rng);
    if (model.in_domain(x) && a.contains(model.kernel(x))) return x;
  }
  throw BudgetError("X^A sampler: acceptance rate too low for the attempt budget");
}

MonteCarloValue ustat_tuple_bound(const UStatModel& model, const PartitionSpec& partition, std::uint64_t reps,
                                  std::uint64_t seed, Exec exec) {
  partition.validate();
  if (reps < 2) throw ParameterError("tuple bound: need at least two replicates");
  std::vector<Box> sets;
  for (const auto& r : partition.sets) {
    const auto* b = std::get_if<Box>(&r);
    if (!b) throw ParameterError("tuple bound: partition sets must be boxes of Y");
    sets.push_back(*b);
  }
  const int d = partition.dim();
  std::vector<double> lam(d);
  for (int i = 0; i < d; ++i) lam[i] = model.intensity(sets[i]);

  std::vector<double> values(reps);
  for_each_index(reps, exec, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    const PointPattern eta = sample_poisson_process(model.base(), rng);
    const LatticePoint before = partition.counts(build_ustat_process(eta, model));
    double v = 0.0;
    for (int i = 0; i < d; ++i) {
      if (!(lam[i] > 0.0)) continue;
      const std::vector<Point> x = sample_xA(model, sets[i], rng);
      PointPattern grown = eta;
      for (const auto& p : x) grown.points.push_back(p);
      const LatticePoint after = partition.counts(build_ustat_process(grown, model));
      const Point g = model.kernel(x);
      double z = 0.0;
      for (int j = 0; j <= i; ++j) {
        const int own = sets[j].contains(g) ? 1 : 0;
        z += std::abs(static_cast<double>(after[j] - before[j] - own));
      }
      v += 2.0 * lam[i] * z;
    }
    values[t] = v;
  });
  const MeanSe m = mean_and_se(values);
  return {m.mean, m.std_error};
}

}  // namespace pal
