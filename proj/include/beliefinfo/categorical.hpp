#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "beliefinfo/errors.hpp"

namespace beliefinfo {

namespace detail {

// Entries in [-tol, 0) are rounding noise from upstream arithmetic and are
// clamped to exact zero; anything more negative is a real sign error.
template <typename Array>
void clamp_negative_noise(Array& a, typename Array::Scalar tol) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < typename Array::Scalar(0)) {
      if (a[i] >= -tol) {
        a[i] = typename Array::Scalar(0);
      } else {
        fail(errc::bad_input,
             "negative probability at index " + std::to_string(i));
      }
    }
    if (!std::isfinite(a[i])) {
      fail(errc::bad_input, "non-finite entry at index " + std::to_string(i));
    }
  }
}

}  // namespace detail

// Normalized distribution over a finite outcome set. Construction enforces
// sum(probs) = 1 within 1e-12 absolute.
template <typename Scalar>
class CategoricalT {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  static constexpr Scalar kNormalizationTol = Scalar(1e-12);

  explicit CategoricalT(Array probs) : p_(std::move(probs)) {
    if (p_.size() == 0) fail(errc::empty_input, "categorical needs at least one outcome");
    detail::clamp_negative_noise(p_, kNormalizationTol);
    const Scalar sum = p_.sum();
    if (std::abs(sum - Scalar(1)) > kNormalizationTol) {
      fail(errc::not_normalized,
           "probabilities sum to " + std::to_string(static_cast<double>(sum)));
    }
  }

  // Rescales arbitrary nonnegative weights to a proper distribution.
  static CategoricalT normalized(Array weights) {
    if (weights.size() == 0) fail(errc::empty_input, "cannot normalize empty weights");
    detail::clamp_negative_noise(weights, kNormalizationTol);
    const Scalar sum = weights.sum();
    if (!(sum > Scalar(0))) fail(errc::degenerate_result, "weights sum to zero");
    weights /= sum;
    // Division can leave the sum a few ulp off; absorb into the largest entry.
    Eigen::Index imax = 0;
    weights.maxCoeff(&imax);
    weights[imax] += Scalar(1) - weights.sum();
    return CategoricalT(std::move(weights));
  }

  static CategoricalT uniform(Eigen::Index n) {
    if (n <= 0) fail(errc::empty_input, "uniform categorical needs n >= 1");
    return normalized(Array::Ones(n));
  }

  const Array& probs() const noexcept { return p_; }
  Eigen::Index size() const noexcept { return p_.size(); }
  Scalar operator[](Eigen::Index i) const { return p_[i]; }

 private:
  Array p_;
};

// Nonnegative view or reference weights over a finite outcome set. Not
// required to normalize; zero entries mark outcomes outside the support.
template <typename Scalar>
class BeliefWeightsT {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit BeliefWeightsT(Array weights) : w_(std::move(weights)) {
    if (w_.size() == 0) fail(errc::empty_input, "belief weights need at least one outcome");
    detail::clamp_negative_noise(w_, Scalar(1e-12));
    if (!(w_.maxCoeff() > Scalar(0))) {
      fail(errc::degenerate_result, "belief weights are identically zero");
    }
  }

  // A categorical is a special case of weights; conversion is lossless.
  BeliefWeightsT(const CategoricalT<Scalar>& q) : w_(q.probs()) {}

  static BeliefWeightsT unit(Eigen::Index n) {
    if (n <= 0) fail(errc::empty_input, "unit weights need n >= 1");
    return BeliefWeightsT(Array::Ones(n));
  }

  const Array& weights() const noexcept { return w_; }
  Eigen::Index size() const noexcept { return w_.size(); }
  Scalar operator[](Eigen::Index i) const { return w_[i]; }

 private:
  Array w_;
};

// Joint distribution over a finite grid, stored dense. Normalization contract
// matches CategoricalT.
template <typename Scalar>
class JointCategoricalT {
 public:
  using Matrix = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit JointCategoricalT(Matrix probs) : p_(std::move(probs)) {
    if (p_.rows() == 0 || p_.cols() == 0) {
      fail(errc::empty_input, "joint categorical needs a nonempty grid");
    }
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      auto col = p_.col(j);
      detail::clamp_negative_noise(col, CategoricalT<Scalar>::kNormalizationTol);
    }
    const Scalar sum = p_.sum();
    if (std::abs(sum - Scalar(1)) > CategoricalT<Scalar>::kNormalizationTol) {
      fail(errc::not_normalized,
           "joint probabilities sum to " + std::to_string(static_cast<double>(sum)));
    }
  }

  const Matrix& probs() const noexcept { return p_; }
  Eigen::Index rows() const noexcept { return p_.rows(); }
  Eigen::Index cols() const noexcept { return p_.cols(); }

  Array row_marginal() const { return p_.rowwise().sum(); }
  Array col_marginal() const { return p_.colwise().sum().transpose(); }

 private:
  Matrix p_;
};

using Categorical = CategoricalT<double>;
using BeliefWeights = BeliefWeightsT<double>;
using JointCategorical = JointCategoricalT<double>;

}  // namespace beliefinfo
