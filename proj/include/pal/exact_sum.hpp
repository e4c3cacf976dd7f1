#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace pal {

// Error-free accumulation of doubles (Shewchuk partials). value() is the
// correctly rounded sum of everything added, independent of insertion order,
// so two algebraically identical formulas evaluated through it agree bitwise.
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (std::size_t k = 0; k < partials_.size(); ++k) {
      double y = partials_[k];
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  // a*b enters exactly as the pair (p, fma(a,b,-p)) unless the product underflows.
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    add(std::fma(a, b, -p));
  }

  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // half-way case: round-half-even needs a look at the next partial
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

  /// Non-overlapping expansion whose exact sum is the accumulated value.
  std::span<const double> partials() const { return partials_; }

 private:
  std::vector<double> partials_;
};

/// Neumaier-compensated running sum; cheaper than ExactSum, order dependent.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace pal
