#pragma once

#include <cmath>
#include <numbers>

namespace gkcp {

/// Neumaier-compensated accumulator. Used for the kernel aggregates where the
/// permutation variances are small differences of large sums.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// x (x-1) ... (x-m+1); zero once the product passes through zero.
inline double falling_factorial(double x, int m) noexcept {
  double out = 1.0;
  for (int i = 0; i < m; ++i) out *= (x - i);
  return out;
}

}  // namespace gkcp
