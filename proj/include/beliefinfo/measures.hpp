#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "beliefinfo/categorical.hpp"
#include "beliefinfo/errors.hpp"
#include "beliefinfo/info_value.hpp"
#include "beliefinfo/numeric.hpp"

// Discrete information measures. Everything reduces to one expectation: the
// view-weighted sum of log belief ratios, in nats. Outcomes with zero view
// weight never contribute, including when their belief ratio is undefined.
//
// Zero-handling on the view's support:
//   q1 = 0, q0 > 0  ->  -inf contribution
//   q1 > 0, q0 = 0  ->  +inf contribution
//   q1 = 0, q0 = 0  ->  undefined_ratio
// Contributions of both infinite signs in one sum raise conflicting_divergence
// rather than silently producing NaN.

namespace beliefinfo {

namespace detail {

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    fail(errc::support_mismatch, std::string(what) + ": outcome counts " +
                                     std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

inline void require_outcome(Eigen::Index i, Eigen::Index n) {
  if (i < 0 || i >= n) {
    fail(errc::index_out_of_range,
         "outcome " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
  }
}

}  // namespace detail

// I(view; q1; q0) = sum_i view[i] * ln(q1[i] / q0[i]) over the view's support.
inline InfoValue info(const BeliefWeights& view, const BeliefWeights& q1,
                      const BeliefWeights& q0) {
  detail::require_same_size(view.size(), q1.size(), "info view/q1");
  detail::require_same_size(view.size(), q0.size(), "info view/q0");

  CompensatedSum<double> acc;
  bool diverges_up = false;
  bool diverges_down = false;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    const double r = view[i];
    if (r == 0.0) continue;
    const double a = q1[i];
    const double b = q0[i];
    if (a == 0.0 && b == 0.0) {
      fail(errc::undefined_ratio,
           "q1 and q0 both vanish at outcome " + std::to_string(i) + " inside the view support");
    }
    if (a == 0.0) {
      diverges_down = true;
    } else if (b == 0.0) {
      diverges_up = true;
    } else {
      acc.add(r * std::log(a / b));
    }
  }
  if (diverges_up && diverges_down) {
    fail(errc::conflicting_divergence, "sum contains both +inf and -inf contributions");
  }
  if (diverges_up) return InfoValue::positive_infinity();
  if (diverges_down) return InfoValue::negative_infinity();
  return {acc.value()};
}

// Pointwise log belief ratio ln(q1[i]/q0[i]) for a single realized outcome.
inline InfoValue info_density(const BeliefWeights& q1, const BeliefWeights& q0,
                              Eigen::Index outcome) {
  detail::require_same_size(q1.size(), q0.size(), "info_density q1/q0");
  detail::require_outcome(outcome, q1.size());
  const double a = q1[outcome];
  const double b = q0[outcome];
  if (a == 0.0 && b == 0.0) {
    fail(errc::undefined_ratio, "q1 and q0 both vanish at the realized outcome");
  }
  if (a == 0.0) return InfoValue::negative_infinity();
  if (b == 0.0) return InfoValue::positive_infinity();
  return {std::log(a / b)};
}

// H(q) = sum_i q[i] ln(1/q[i]); zero-probability outcomes contribute zero.
inline InfoValue entropy(const Categorical& q) {
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) acc.add(-q[i] * std::log(q[i]));
  }
  return {acc.value()};
}

// Expected surprisal of q under the view; +inf when q vanishes on the support.
inline InfoValue cross_entropy(const BeliefWeights& view, const BeliefWeights& q) {
  detail::require_same_size(view.size(), q.size(), "cross_entropy view/q");
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] == 0.0) continue;
    if (q[i] == 0.0) return InfoValue::positive_infinity();
    acc.add(-view[i] * std::log(q[i]));
  }
  return {acc.value()};
}

// Surprisal ln(1/q[outcome]) of one realized outcome.
inline InfoValue realization_info(const BeliefWeights& q, Eigen::Index outcome) {
  detail::require_outcome(outcome, q.size());
  if (q[outcome] == 0.0) return InfoValue::positive_infinity();
  return {-std::log(q[outcome])};
}

// KL divergence, i.e. the information with the updated belief as its own view.
inline InfoValue kl(const Categorical& q1, const BeliefWeights& q0) {
  const BeliefWeights as_view(q1);
  return info(as_view, as_view, q0);
}

// Uncertainty change H(q1) - H(q0); sign is positive when uncertainty grew.
// The supports need not match: each entropy stands on its own.
inline InfoValue lindley_info(const Categorical& q1, const Categorical& q0) {
  return {entropy(q1).nats - entropy(q0).nats};
}

// I(Z;W) = sum_zw p(z,w) ln(p(z,w) / (p(z)p(w))). Cells of zero mass are
// skipped; marginals dominate cell mass so no denominator can vanish.
inline InfoValue mutual_information(const JointCategorical& joint) {
  const auto rm = joint.row_marginal();
  const auto cm = joint.col_marginal();
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      const double p = joint.probs()(i, j);
      if (p > 0.0) acc.add(p * std::log(p / (rm[i] * cm[j])));
    }
  }
  return {acc.value()};
}

// (sum_i view[i] |ln(q1[i]/q0[i])|^p)^(1/p) for p >= 1, in nats. One-sided
// divergence on the support makes the distance +inf.
inline double pseudometric_lp(const BeliefWeights& view, const BeliefWeights& q1,
                              const BeliefWeights& q0, double p) {
  if (!(p >= 1.0)) fail(errc::invalid_order, "pseudometric order must satisfy p >= 1");
  detail::require_same_size(view.size(), q1.size(), "pseudometric view/q1");
  detail::require_same_size(view.size(), q0.size(), "pseudometric view/q0");
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] == 0.0) continue;
    const double a = q1[i];
    const double b = q0[i];
    if (a == 0.0 && b == 0.0) {
      fail(errc::undefined_ratio,
           "q1 and q0 both vanish at outcome " + std::to_string(i) + " inside the view support");
    }
    if (a == 0.0 || b == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    acc.add(view[i] * std::pow(std::abs(std::log(a / b)), p));
  }
  return std::pow(acc.value(), 1.0 / p);
}

// View-weighted variance of the log belief ratio around the information value,
// in nats squared. Defined only when the information itself is finite.
inline double info_variance(const BeliefWeights& view, const BeliefWeights& q1,
                            const BeliefWeights& q0) {
  const InfoValue phi = info(view, q1, q0);
  if (!phi.finite()) {
    fail(errc::non_finite_info, "info_variance requires finite information");
  }
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] == 0.0) continue;
    const double d = std::log(q1[i] / q0[i]) - phi.nats;
    acc.add(view[i] * d * d);
  }
  return acc.value();
}

// Directional derivative of I(view; q1 + eps*eta; q0) at eps = 0, which is
// sum_i view[i] * eta[i] / q1[i] and does not involve q0. eta must sum to zero
// so that q1 + eps*eta stays normalized to first order.
inline double perturbation_derivative(const BeliefWeights& view, const Categorical& q1,
                                      const Eigen::ArrayXd& eta) {
  detail::require_same_size(view.size(), q1.size(), "perturbation view/q1");
  detail::require_same_size(view.size(), eta.size(), "perturbation view/eta");
  const double drift = eta.sum();
  if (std::abs(drift) > 1e-9 * std::max(1.0, eta.abs().sum())) {
    fail(errc::bad_input, "perturbation direction must sum to zero");
  }
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] == 0.0 || eta[i] == 0.0) continue;
    if (q1[i] == 0.0) {
      fail(errc::zero_denominator,
           "q1 vanishes at outcome " + std::to_string(i) + " where the perturbation acts");
    }
    acc.add(view[i] * eta[i] / q1[i]);
  }
  return acc.value();
}

}  // namespace beliefinfo
