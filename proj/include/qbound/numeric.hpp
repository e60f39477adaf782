#pragma once

#include <cmath>

namespace qb {

// Neumaier variant of compensated summation. Accumulation order is part of
// the contract wherever reproducibility at the 1e-12 level matters, so
// callers add terms in a fixed, documented order.
class NeumaierSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace qb
