#include "pal/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <vector>
#include <algorithm>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pal/errors.hpp"

namespace pal {

namespace {

constexpr std::size_t kMaxIntervals = 4000;

struct Piece {
  double a, b, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk31(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  Piece p{a, b, 0.0, 0.0, 0.0};
  p.value = GK::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
  return p;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                     std::span<const double> breaks) {
  if (a == b) return {};
  if (b < a) {
    const QuadResult r = integrate(f, b, a, rel_tol, abs_tol, breaks);
    return {-r.value, r.error};
  }
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // global adaptivity: always split the piece with the largest error
  std::priority_queue<Piece> heap;
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Piece p = gk31(f, edges[i], edges[i + 1]);
    value += p.value;
    error += p.error;
    l1 += p.l1;
    heap.push(p);
  }
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon();
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && error > roundoff * l1) {
    if (heap.size() >= kMaxIntervals) break;
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Piece left = gk31(f, worst.a, mid), right = gk31(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // re-add the pieces to drop the drift of the running sums
  value = error = l1 = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  if (!std::isfinite(value)) throw ContractError("quadrature produced a non-finite value");
  if (error > std::max(abs_tol, rel_tol * std::abs(value)) && error > roundoff * l1)
    throw ContractError("quadrature did not reach the requested tolerance");
  return {value, error};
}

QuadResult integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box, double rel_tol,
                         double abs_tol) {
  box.validate();
  if (box.dim() == 1) {
    return integrate([&](double x) { return f(std::span<const double>(&x, 1)); }, box.lo[0], box.hi[0], rel_tol,
                     abs_tol);
  }
  if (box.dim() == 2) {
    double inner_err = 0.0;
    const QuadResult outer = integrate(
        [&](double x) {
          const QuadResult in = integrate(
              [&](double y) {
                const double p[2] = {x, y};
                return f(std::span<const double>(p, 2));
              },
              box.lo[1], box.hi[1], rel_tol, abs_tol);
          inner_err = std::max(inner_err, in.error);
          return in.value;
        },
        box.lo[0], box.hi[0], rel_tol, abs_tol);
    return {outer.value, outer.error + inner_err * (box.hi[0] - box.lo[0])};
  }
  throw ParameterError("quadrature: only boxes of dimension 1 or 2 are supported");
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1 || n > 200) throw ParameterError("Gauss-Legendre order out of range");
  // Newton on P_n from the Chebyshev-like initial guesses
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace pal
