#include "pal/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/stats.hpp"

namespace pal {

namespace {

constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

Point uniform_point(const Box& b, Rng& rng) {
  Point x(b.dim());
  for (int a = 0; a < b.dim(); ++a) x[a] = uniform(rng, b.lo[a], b.hi[a]);
  return x;
}

}  // namespace

void GibbsModel::validate() const {
  window.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("Gibbs: beta must be finite and > 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("Gibbs: theta must be finite and >= 0");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParameterError("Gibbs: rho must be finite and >= 0");
  if (!(acceptance_floor > 0.0 && acceptance_floor <= 1.0)) throw ParameterError("Gibbs: acceptance floor in (0,1]");
  if (beta * window.volume() > kMaxExpectedPoints) throw CapacityError("Gibbs: expected proposal size above capacity");
}

int GibbsModel::neighbours(std::span<const double> x, const PointPattern& xi, std::size_t skip) const {
  const double r2 = rho * rho;
  int n = 0;
  for (std::size_t k = 0; k < xi.points.size(); ++k)
    if (k != skip && squared_distance(x, xi.points[k]) <= r2) ++n;
  return n;
}

double GibbsModel::papangelou(std::span<const double> x, const PointPattern& xi, std::size_t skip) const {
  if (theta == 0.0) return beta;
  return beta * std::exp(-theta * neighbours(x, xi, skip));
}

long GibbsModel::close_pairs(const PointPattern& xi) const {
  const double r2 = rho * rho;
  long s = 0;
  for (std::size_t a = 0; a < xi.points.size(); ++a)
    for (std::size_t b = a + 1; b < xi.points.size(); ++b)
      if (squared_distance(xi.points[a], xi.points[b]) <= r2) ++s;
  return s;
}

GibbsModel GibbsModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("Gibbs model must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "beta" && k != "theta" && k != "rho" && k != "window" && k != "acceptance_floor")
      throw ParameterError("Gibbs model: unknown key '" + k + "'");
  for (const char* k : {"beta", "theta", "rho", "window"})
    if (!j.contains(k)) throw ParameterError(std::string("Gibbs model: missing key '") + k + "'");
  GibbsModel m;
  m.beta = j.at("beta").get<double>();
  m.theta = j.at("theta").get<double>();
  m.rho = j.at("rho").get<double>();
  m.window = box_from_json(j.at("window"));
  if (j.contains("acceptance_floor")) m.acceptance_floor = j.at("acceptance_floor").get<double>();
  m.validate();
  return m;
}

nlohmann::json GibbsModel::to_json() const {
  return {{"beta", beta}, {"theta", theta}, {"rho", rho}, {"window", window}, {"acceptance_floor", acceptance_floor}};
}

PointPattern sample_gibbs(const GibbsModel& model, Rng& rng) {
  model.validate();
  const IntensityMeasure proposal = IntensityMeasure::constant(model.window, model.beta);
  const long attempts = static_cast<long>(std::ceil(20.0 / model.acceptance_floor));
  for (long t = 0; t < attempts; ++t) {
    PointPattern xi = sample_poisson_process(proposal, rng);
    if (model.theta == 0.0) return xi;
    const double accept = std::exp(-model.theta * static_cast<double>(model.close_pairs(xi)));
    if (uniform01(rng) < accept) return xi;
  }
  throw BudgetError("Gibbs: acceptance rate below the configured floor; reduce theta, beta or the window");
}

PointPattern sample_gibbs(const GibbsModel& model, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  return sample_gibbs(model, rng);
}

GnzTestFunction gnz_constant_one() {
  return [](std::span<const double>, const PointPattern&, std::size_t) { return 1.0; };
}

GnzTestFunction gnz_total_count() {
  return [](std::span<const double>, const PointPattern& xi, std::size_t skip) {
    return static_cast<double>(xi.size() - (skip < xi.size() ? 1 : 0));
  };
}

GnzTestFunction gnz_indicator_empty(Box a, Box b) {
  a.validate();
  b.validate();
  return [a = std::move(a), b = std::move(b)](std::span<const double> x, const PointPattern& xi, std::size_t skip) {
    if (!a.contains(x)) return 0.0;
    for (std::size_t k = 0; k < xi.points.size(); ++k)
      if (k != skip && b.contains(xi.points[k])) return 0.0;
    return 1.0;
  };
}

GnzTestFunction gnz_test_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParameterError("test function: need an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  for (const auto& [k, v] : j.items())
    if (k != "kind" && k != "A" && k != "B") throw ParameterError("test function: unknown key '" + k + "'");
  if (kind == "one") return gnz_constant_one();
  if (kind == "count") return gnz_total_count();
  if (kind == "indicator_empty") return gnz_indicator_empty(box_from_json(j.at("A")), box_from_json(j.at("B")));
  throw ParameterError("test function: unknown kind '" + kind + "'");
}

GnzReport gnz_check(const GibbsModel& model, const GnzTestFunction& u, const GnzOptions& opt) {
  model.validate();
  if (opt.reps < 2) throw ParameterError("GNZ: need at least two replicates");
  if (opt.inner_points < 1) throw ParameterError("GNZ: need at least one inner point");
  std::vector<double> lhs(opt.reps), rhs(opt.reps), diff(opt.reps);
  const double vol = model.window.volume();
  for_each_index(opt.reps, opt.exec, [&](std::size_t t) {
    Rng rng = make_stream(opt.seed, t);
    const PointPattern xi = sample_gibbs(model, rng);
    double l = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) l += u(xi.points[k], xi, k);
    double r = 0.0;
    for (int s = 0; s < opt.inner_points; ++s) {
      const Point x = uniform_point(model.window, rng);
      const double ux = u(x, xi, kNoSkip);
      if (ux != 0.0) r += model.papangelou(x, xi) * ux;
    }
    r *= vol / opt.inner_points;
    lhs[t] = l;
    rhs[t] = r;
    diff[t] = l - r;
  });
  GnzReport rep;
  rep.lhs = mean_and_se(lhs).mean;
  rep.rhs = mean_and_se(rhs).mean;
  const MeanSe d = mean_and_se(diff);
  rep.std_error = d.std_error;
  if (d.std_error > 0.0)
    rep.z_score = d.mean / d.std_error;
  else
    rep.z_score = d.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d.mean);
  return rep;
}

QuadResult papangelou_gap(const GibbsModel& model, const IntensityMeasure& target, const PointPattern& xi,
                          int gauss_order) {
  const Box& w = model.window;
  const bool flat = target.is_constant();
  const double f_const = flat ? target.sup_density() : 0.0;
  const GaussRule& seg_rule = gauss_legendre(gauss_order);
  std::vector<double> level(xi.size() + 1);
  for (std::size_t n = 0; n < level.size(); ++n) level[n] = model.beta * std::exp(-model.theta * static_cast<double>(n));

  // int over [x0, x1] (second coordinate fixed to y, if any) of |c_n - f|
  auto segment = [&](double x0, double x1, int n, const double* y) {
    if (x1 <= x0) return 0.0;
    if (flat) return (x1 - x0) * std::abs(level[n] - f_const);
    double acc = 0.0;
    for (std::size_t g = 0; g < seg_rule.nodes.size(); ++g) {
      const double p[2] = {0.5 * (x0 + x1) + 0.5 * (x1 - x0) * seg_rule.nodes[g], y ? *y : 0.0};
      acc += seg_rule.weights[g] * std::abs(level[n] - target.density(std::span<const double>(p, y ? 2 : 1)));
    }
    return 0.5 * (x1 - x0) * acc;
  };

  // sweep along the first axis: each point contributes the chord [c - h, c + h]
  std::vector<std::pair<double, int>> events;
  auto line = [&](const std::vector<std::pair<double, double>>& chords, const double* y) {
    events.clear();
    for (const auto& [c, h] : chords) {
      events.emplace_back(c - h, +1);
      events.emplace_back(c + h, -1);
    }
    std::sort(events.begin(), events.end());
    double acc = 0.0;
    double pos = w.lo[0];
    int n = 0;
    for (const auto& [x, delta] : events) {
      const double stop = std::clamp(x, w.lo[0], w.hi[0]);
      if (stop > pos) {
        acc += segment(pos, stop, n, y);
        pos = stop;
      }
      n += delta;
    }
    if (w.hi[0] > pos) acc += segment(pos, w.hi[0], n, y);
    return acc;
  };

  if (w.dim() == 1) {
    std::vector<std::pair<double, double>> chords;
    for (const auto& p : xi.points) chords.emplace_back(p[0], model.rho);
    return {line(chords, nullptr), 0.0};
  }
  if (w.dim() != 2) throw ParameterError("Papangelou bound: windows of dimension 1 or 2 only");

  const double r = model.rho;
  auto at_height = [&](double y) {
    std::vector<std::pair<double, double>> chords;
    for (const auto& p : xi.points) {
      const double dy = y - p[1];
      if (std::abs(dy) < r) chords.emplace_back(p[0], std::sqrt(r * r - dy * dy));
    }
    return line(chords, &y);
  };

  // heights where the chord picture changes: disk tops and bottoms, disk
  // crossings, and disks crossing the vertical window edges
  std::vector<double> cuts{w.lo[1], w.hi[1]};
  if (r > 0.0) {
    for (std::size_t a = 0; a < xi.size(); ++a) {
      const auto& p = xi.points[a];
      cuts.push_back(p[1] - r);
      cuts.push_back(p[1] + r);
      for (double edge : {w.lo[0], w.hi[0]}) {
        const double dx = edge - p[0];
        if (std::abs(dx) < r) {
          const double h = std::sqrt(r * r - dx * dx);
          cuts.push_back(p[1] - h);
          cuts.push_back(p[1] + h);
        }
      }
      for (std::size_t b = a + 1; b < xi.size(); ++b) {
        const auto& q = xi.points[b];
        const double dx = q[0] - p[0], dy = q[1] - p[1];
        const double dd = dx * dx + dy * dy;
        if (dd == 0.0 || dd >= 4.0 * r * r) continue;
        const double half = std::sqrt(dd) / 2.0;
        const double off = std::sqrt(r * r - half * half);
        const double mx = p[1] + dy / 2.0;
        const double ux = -dx / std::sqrt(dd);  // unit normal, second component
        cuts.push_back(mx + off * ux);
        cuts.push_back(mx - off * ux);
      }
    }
  }
  for (auto& c : cuts) c = std::clamp(c, w.lo[1], w.hi[1]);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // cosine substitution on every piece absorbs the square-root behaviour at its ends
  const GaussRule& coarse = gauss_legendre(gauss_order);
  const GaussRule& fine = gauss_legendre(2 * gauss_order);
  auto piece = [&](double a, double b, const GaussRule& rule) {
    double acc = 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = 0.5 * M_PI * (rule.nodes[g] + 1.0);
      const double y = 0.5 * (a + b) - 0.5 * (b - a) * std::cos(s);
      acc += rule.weights[g] * at_height(y) * std::sin(s);
    }
    return acc * 0.5 * M_PI * 0.5 * (b - a);
  };
  // bisect a piece until its two rules agree to 1e-9 relative
  CompensatedSum value;
  double error = 0.0;
  const double height = w.hi[1] - w.lo[1];
  auto refine = [&](auto&& self, double a, double b, int depth) -> void {
    const double lo = piece(a, b, coarse);
    const double hi = piece(a, b, fine);
    const double gap = std::abs(hi - lo);
    if (gap <= 1e-9 * std::abs(hi) + 1e-13 * (b - a) / height || depth >= 12) {
      value += hi;
      error += gap;
      return;
    }
    const double mid = 0.5 * (a + b);
    self(self, a, mid, depth + 1);
    self(self, mid, b, depth + 1);
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k]) refine(refine, cuts[k], cuts[k + 1], 0);
  return {value.value(), error};
}

PapangelouReport papangelou_bound(const GibbsModel& model, const IntensityMeasure& target,
                                  const PapangelouOptions& opt) {
  model.validate();
  if (opt.reps < 2) throw ParameterError("Papangelou bound: need at least two replicates");
  if (!std::holds_alternative<Box>(target.window()) || std::get<Box>(target.window()).dim() != model.window.dim())
    throw ParameterError("Papangelou bound: target must live on a box of the model's dimension");
  const Box& tw = std::get<Box>(target.window());
  if (tw.lo != model.window.lo || tw.hi != model.window.hi)
    throw ParameterError("Papangelou bound: target window must equal the model window");
  std::vector<double> gaps(opt.reps), errs(opt.reps);
  for_each_index(opt.reps, opt.exec, [&](std::size_t t) {
    Rng rng = make_stream(opt.seed, t);
    const PointPattern xi = sample_gibbs(model, rng);
    const QuadResult q = papangelou_gap(model, target, xi, opt.gauss_order);
    gaps[t] = q.value;
    errs[t] = q.error;
  });
  PapangelouReport rep;
  const MeanSe m = mean_and_se(gaps);
  rep.estimate = m.mean;
  rep.std_error = m.std_error;
  rep.quadrature_error = mean_and_se(errs).mean;
  return rep;
}

}  // namespace pal
