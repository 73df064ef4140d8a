#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "beliefinfo/numeric.hpp"

namespace beliefinfo {

// Extended-real information amount, carried in nats. Signed infinities encode
// one-sided divergences; NaN is never a legal state (conflicting divergences
// raise instead of producing one).
template <typename Scalar>
struct InfoValueT {
  Scalar nats{0};

  static InfoValueT positive_infinity() noexcept {
    return {std::numeric_limits<Scalar>::infinity()};
  }
  static InfoValueT negative_infinity() noexcept {
    return {-std::numeric_limits<Scalar>::infinity()};
  }

  Scalar bits() const noexcept { return nats / std::numbers::ln2_v<Scalar>; }
  Scalar in(Unit unit) const noexcept { return nats_to(nats, unit); }

  bool finite() const noexcept { return std::isfinite(nats); }
  bool positive_infinite() const noexcept {
    return std::isinf(nats) && nats > Scalar(0);
  }
  bool negative_infinite() const noexcept {
    return std::isinf(nats) && nats < Scalar(0);
  }

  friend bool operator==(const InfoValueT&, const InfoValueT&) = default;
};

using InfoValue = InfoValueT<double>;

}  // namespace beliefinfo
