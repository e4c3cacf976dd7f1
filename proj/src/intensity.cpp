#include "pal/intensity.hpp"

#include <algorithm>
#include <cmath>

#include "pal/errors.hpp"
#include "pal/quadrature.hpp"

namespace pal {

namespace {

// Lebesgue point on the box, kept strictly below hi.
Point uniform_in(const Box& b, Rng& rng) {
  Point x(b.dim());
  for (int a = 0; a < b.dim(); ++a) {
    x[a] = uniform(rng, b.lo[a], b.hi[a]);
    if (x[a] >= b.hi[a]) x[a] = std::nextafter(b.hi[a], b.lo[a]);
  }
  return x;
}

Box intersect(const Box& a, const Box& b) {
  Box c = a;
  for (int k = 0; k < a.dim(); ++k) {
    c.lo[k] = std::max(a.lo[k], b.lo[k]);
    c.hi[k] = std::min(a.hi[k], b.hi[k]);
  }
  return c;
}

}  // namespace

IntensityMeasure IntensityMeasure::constant(Box window, double value) {
  window.validate();
  if (!(value >= 0.0) || !std::isfinite(value)) throw ParameterError("intensity: constant must be finite and >= 0");
  IntensityMeasure m;
  m.kind_ = Kind::kConstant;
  m.a_ = value;
  m.sup_ = value;
  m.total_ = value * window.volume();
  m.window_ = std::move(window);
  return m;
}

IntensityMeasure IntensityMeasure::linear(Box window, double a, std::vector<double> b) {
  window.validate();
  if (static_cast<int>(b.size()) != window.dim()) throw ParameterError("intensity: slope has wrong dimension");
  IntensityMeasure m;
  m.kind_ = Kind::kLinear;
  m.a_ = a;
  m.b_ = std::move(b);
  // extremes of an affine function sit at corners
  double lo = a, hi = a, centre = a;
  for (int k = 0; k < window.dim(); ++k) {
    lo += std::min(m.b_[k] * window.lo[k], m.b_[k] * window.hi[k]);
    hi += std::max(m.b_[k] * window.lo[k], m.b_[k] * window.hi[k]);
    centre += m.b_[k] * 0.5 * (window.lo[k] + window.hi[k]);
  }
  if (lo < 0.0) throw ParameterError("intensity: linear density is negative somewhere on the window");
  m.sup_ = hi;
  m.total_ = centre * window.volume();
  m.window_ = std::move(window);
  return m;
}

IntensityMeasure IntensityMeasure::labels(std::vector<double> weights) {
  if (weights.empty()) throw ParameterError("intensity: label weights are empty");
  IntensityMeasure m;
  m.kind_ = Kind::kLabels;
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("intensity: label weights must be finite and >= 0");
  m.sup_ = *std::max_element(weights.begin(), weights.end());
  for (double w : weights) m.total_ += w;
  m.window_ = LabelSpace{static_cast<int>(weights.size())};
  m.weights_ = std::move(weights);
  return m;
}

IntensityMeasure IntensityMeasure::custom(Box window, std::function<double(std::span<const double>)> f,
                                          double sup_density) {
  window.validate();
  if (!std::isfinite(sup_density) || sup_density < 0.0)
    throw ParameterError("intensity: custom density needs a finite sup bound");
  IntensityMeasure m;
  m.kind_ = Kind::kCustom;
  m.f_ = std::move(f);
  m.sup_ = sup_density;
  const QuadResult q = integrate_box(m.f_, window, 1e-10, 1e-13);
  m.total_ = q.value;
  m.total_error_ = q.error;
  m.window_ = std::move(window);
  return m;
}

double IntensityMeasure::density(std::span<const double> x) const {
  switch (kind_) {
    case Kind::kConstant:
      return std::get<Box>(window_).contains(x) ? a_ : 0.0;
    case Kind::kLinear: {
      if (!std::get<Box>(window_).contains(x)) return 0.0;
      double v = a_;
      for (std::size_t k = 0; k < b_.size(); ++k) v += b_[k] * x[k];
      return std::max(0.0, v);
    }
    case Kind::kLabels: {
      if (x.size() != 1) return 0.0;
      const double l = x[0];
      if (l < 0 || l >= static_cast<double>(weights_.size()) || l != std::floor(l)) return 0.0;
      return weights_[static_cast<std::size_t>(l)];
    }
    case Kind::kCustom:
      return std::get<Box>(window_).contains(x) ? f_(x) : 0.0;
  }
  return 0.0;
}

double IntensityMeasure::measure(const Region& r) const {
  if (kind_ == Kind::kLabels) {
    const auto* s = std::get_if<LabelSet>(&r);
    if (!s) throw ParameterError("intensity: a label measure needs a label-set region");
    double v = 0.0;
    for (int l : s->labels)
      if (l >= 0 && l < static_cast<int>(weights_.size())) v += weights_[l];
    return v;
  }
  const auto* b = std::get_if<Box>(&r);
  if (!b) throw ParameterError("intensity: a box measure needs a box region");
  const Box& w = std::get<Box>(window_);
  const double vol = overlap_volume(*b, w);
  if (vol == 0.0) return 0.0;
  const Box c = intersect(*b, w);
  switch (kind_) {
    case Kind::kConstant:
      return a_ * vol;
    case Kind::kLinear: {
      double centre = a_;
      for (int k = 0; k < c.dim(); ++k) centre += b_[k] * 0.5 * (c.lo[k] + c.hi[k]);
      return centre * vol;
    }
    case Kind::kCustom:
      return integrate_box(f_, c, 1e-10, 1e-13).value;
    default:
      return 0.0;
  }
}

nlohmann::json IntensityMeasure::to_json() const {
  switch (kind_) {
    case Kind::kConstant:
      return {{"kind", "constant"}, {"window", std::get<Box>(window_)}, {"value", a_}};
    case Kind::kLinear:
      return {{"kind", "linear"}, {"window", std::get<Box>(window_)}, {"a", a_}, {"b", b_}};
    case Kind::kLabels:
      return {{"kind", "labels"}, {"weights", weights_}};
    case Kind::kCustom:
      return {{"kind", "custom"}, {"window", std::get<Box>(window_)}, {"total", total_}};
  }
  return {};
}

IntensityMeasure IntensityMeasure::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParameterError("intensity: need an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items())
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
        throw ParameterError("intensity: unknown key '" + k + "'");
  };
  if (kind == "constant") {
    allow({"kind", "window", "value"});
    return constant(box_from_json(j.at("window")), j.at("value").get<double>());
  }
  if (kind == "linear") {
    allow({"kind", "window", "a", "b"});
    return linear(box_from_json(j.at("window")), j.at("a").get<double>(), j.at("b").get<std::vector<double>>());
  }
  if (kind == "labels") {
    allow({"kind", "weights"});
    return labels(j.at("weights").get<std::vector<double>>());
  }
  throw ParameterError("intensity: unknown kind '" + kind + "'");
}

Point sample_point(const IntensityMeasure& intensity, Rng& rng) {
  if (!(intensity.total() > 0.0)) throw ParameterError("cannot sample from a zero measure");
  if (const auto* space = std::get_if<LabelSpace>(&intensity.window())) {
    // inverse CDF over the labels
    const double u = uniform01(rng) * intensity.total();
    double acc = 0.0;
    for (int l = 0; l < space->size; ++l) {
      const double x = l;
      acc += intensity.density(std::span<const double>(&x, 1));
      if (u < acc) return Point{x};
    }
    for (int l = space->size - 1; l >= 0; --l) {
      const double x = l;
      if (intensity.density(std::span<const double>(&x, 1)) > 0.0) return Point{x};
    }
  }
  const Box& w = std::get<Box>(intensity.window());
  const double sup = intensity.sup_density();
  while (true) {
    Point x = uniform_in(w, rng);
    if (intensity.is_constant() || uniform01(rng) * sup < intensity.density(x)) return x;
  }
}

PointPattern sample_poisson_process(const IntensityMeasure& intensity, Rng& rng) {
  const double total = intensity.total();
  if (total > kMaxExpectedPoints) throw CapacityError("Poisson process: expected point count above capacity");
  PointPattern out;
  const long n = poisson_draw(rng, total);
  out.points.reserve(n);
  for (long i = 0; i < n; ++i) out.points.push_back(sample_point(intensity, rng));
  return out;
}

PointPattern sample_poisson_process(const IntensityMeasure& intensity, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  return sample_poisson_process(intensity, rng);
}

}  // namespace pal
