#pragma once

#include <cmath>
#include <numbers>

namespace beliefinfo {

// Neumaier variant of Kahan summation. Sums of log-ratio terms are the hot
// path of every measure here and they cancel heavily near zero information,
// so plain accumulation is not good enough for the 1e-12 contracts.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar v) noexcept {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  Scalar value() const noexcept { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

enum class Unit { nats, bits };

// bits = nats / ln 2, applied at presentation only; everything internal is nats.
template <typename Scalar>
constexpr Scalar nats_to(Scalar nats, Unit unit) noexcept {
  return unit == Unit::bits ? nats / std::numbers::ln2_v<Scalar> : nats;
}

template <typename Scalar>
constexpr Scalar to_nats(Scalar value, Unit unit) noexcept {
  return unit == Unit::bits ? value * std::numbers::ln2_v<Scalar> : value;
}

}  // namespace beliefinfo
