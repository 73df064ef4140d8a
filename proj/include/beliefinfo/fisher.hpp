#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "beliefinfo/categorical.hpp"
#include "beliefinfo/errors.hpp"
#include "beliefinfo/gaussian.hpp"
#include "beliefinfo/measures.hpp"

// Derivatives of I(view; P(X|theta); q0) with respect to theta. The reference
// belief only adds a theta-independent constant, so it is validated and then
// dropped before any differencing; rescaling q0 therefore cannot move a score
// or a Hessian entry even at the roundoff level.
//
// Gaussian location families have closed forms. Everything else goes through
// central differences with per-coordinate step h = cbrt(eps) * max(1, |theta|)
// and a Richardson-extrapolated Hessian.

namespace beliefinfo {

struct DiscreteFamily {
  int param_dim;
  std::function<Categorical(const Eigen::VectorXd&)> eval;
};

// P(X = i | theta) = softmax((K theta)_i) over kernel.rows() outcomes.
inline DiscreteFamily categorical_softmax_family(Eigen::MatrixXd kernel) {
  if (kernel.rows() < 2 || kernel.cols() < 1) {
    fail(errc::bad_input, "softmax kernel needs at least 2 outcomes and 1 parameter");
  }
  return {static_cast<int>(kernel.cols()),
          [K = std::move(kernel)](const Eigen::VectorXd& theta) {
            Eigen::ArrayXd logits = (K * theta).array();
            logits -= logits.maxCoeff();
            return Categorical::normalized(logits.exp());
          }};
}

enum class FisherMethod { automatic, analytic, finite_difference };

namespace detail {

inline double fd_step(double coord) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(coord));
}

// Theta-dependent part of the information: E_view[ln P(X|theta)].
inline double discrete_objective(const BeliefWeights& view, const DiscreteFamily& family,
                                 const Eigen::VectorXd& theta) {
  Categorical p = [&] {
    try {
      return family.eval(theta);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(errc::evaluation_failure, std::string("family evaluation failed: ") + e.what());
    }
  }();
  if (p.size() != view.size()) {
    fail(errc::support_mismatch, "family outcome count does not match the view");
  }
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] == 0.0) continue;
    if (p[i] <= 0.0) {
      fail(errc::non_finite_info,
           "family belief vanishes at outcome " + std::to_string(i) + " inside the view support");
    }
    acc.add(view[i] * std::log(p[i]));
  }
  return acc.value();
}

template <typename Objective>
Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& theta) {
  Eigen::VectorXd g(theta.size());
  Eigen::VectorXd t = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = fd_step(theta[j]);
    t[j] = theta[j] + h;
    const double up = f(t);
    t[j] = theta[j] - h;
    const double down = f(t);
    t[j] = theta[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

template <typename Objective>
Eigen::MatrixXd fd_hessian_at(const Objective& f, const Eigen::VectorXd& theta, double scale) {
  const Eigen::Index d = theta.size();
  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd t = theta;
  const double f0 = f(theta);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double hi = scale * fd_step(theta[i]);
    t[i] = theta[i] + hi;
    const double up = f(t);
    t[i] = theta[i] - hi;
    const double down = f(t);
    t[i] = theta[i];
    H(i, i) = (up - 2.0 * f0 + down) / (hi * hi);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double hj = scale * fd_step(theta[j]);
      t[i] = theta[i] + hi; t[j] = theta[j] + hj;
      const double pp = f(t);
      t[j] = theta[j] - hj;
      const double pm = f(t);
      t[i] = theta[i] - hi;
      const double mm = f(t);
      t[j] = theta[j] + hj;
      const double mp = f(t);
      t[i] = theta[i]; t[j] = theta[j];
      H(i, j) = H(j, i) = (pp - pm - mp + mm) / (4.0 * hi * hj);
    }
  }
  return H;
}

// Step-halving consistency pair at h and h/2; the two estimates must roughly
// agree or the objective is too rough for differencing to mean anything. The
// step-h stencil is returned: halving only raises roundoff once the check has
// ruled out truncation trouble.
template <typename Objective>
Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd coarse = fd_hessian_at(f, theta, 1.0);
  const Eigen::MatrixXd fine = fd_hessian_at(f, theta, 0.5);
  const double scale = std::max(1.0, coarse.lpNorm<Eigen::Infinity>());
  if ((fine - coarse).lpNorm<Eigen::Infinity>() > 1e-2 * scale) {
    fail(errc::no_convergence, "finite-difference Hessian failed the step-halving check");
  }
  return coarse;
}

inline void check_discrete_reference(const BeliefWeights& view, const BeliefWeights& q0) {
  if (q0.size() != view.size()) {
    fail(errc::support_mismatch, "q0 outcome count does not match the view");
  }
  for (Eigen::Index i = 0; i < view.size(); ++i) {
    if (view[i] > 0.0 && q0[i] == 0.0) {
      fail(errc::non_finite_info, "q0 vanishes inside the view support; information is infinite");
    }
  }
}

}  // namespace detail

inline Eigen::VectorXd fisher_score(const BeliefWeights& view, const DiscreteFamily& family,
                                    const BeliefWeights& q0, const Eigen::VectorXd& theta,
                                    FisherMethod = FisherMethod::automatic) {
  detail::check_discrete_reference(view, q0);
  if (theta.size() != family.param_dim) {
    fail(errc::dimension_mismatch, "theta dimension does not match the family");
  }
  return detail::fd_gradient(
      [&](const Eigen::VectorXd& t) { return detail::discrete_objective(view, family, t); },
      theta);
}

inline Eigen::MatrixXd fisher_matrix(const BeliefWeights& view, const DiscreteFamily& family,
                                     const BeliefWeights& q0, const Eigen::VectorXd& theta,
                                     FisherMethod = FisherMethod::automatic) {
  detail::check_discrete_reference(view, q0);
  if (theta.size() != family.param_dim) {
    fail(errc::dimension_mismatch, "theta dimension does not match the family");
  }
  return detail::fd_hessian(
      [&](const Eigen::VectorXd& t) { return detail::discrete_objective(view, family, t); },
      theta);
}

// Gaussian location family: theta -> N(theta, noise_cov). The reference may be
// any Gaussian or flat (std::nullopt); either way it drops out of derivatives.
// Analytic forms: score = Sigma^-1 (nu - theta), Hessian = -Sigma^-1. The
// Hessian is the curvature of assessed information, so it carries the negative
// sign of a maximum rather than the positive-definite convention.
inline Eigen::VectorXd fisher_score(const Gaussian& view, const LocationModel& family,
                                    const std::optional<Gaussian>& q0, const Eigen::VectorXd& theta,
                                    FisherMethod method = FisherMethod::automatic) {
  detail::require_same_dim(view.dim(), family.dim(), "fisher view/family");
  detail::require_same_dim(view.dim(), theta.size(), "fisher view/theta");
  if (q0) detail::require_same_dim(view.dim(), q0->dim(), "fisher view/q0");
  if (method == FisherMethod::finite_difference) {
    return detail::fd_gradient(
        [&](const Eigen::VectorXd& t) {
          return expected_log_pdf(view, Gaussian(t, family.noise_cov()));
        },
        theta);
  }
  return family.noise_llt().solve(view.mean() - theta);
}

inline Eigen::MatrixXd fisher_matrix(const Gaussian& view, const LocationModel& family,
                                     const std::optional<Gaussian>& q0, const Eigen::VectorXd& theta,
                                     FisherMethod method = FisherMethod::automatic) {
  detail::require_same_dim(view.dim(), family.dim(), "fisher view/family");
  detail::require_same_dim(view.dim(), theta.size(), "fisher view/theta");
  if (q0) detail::require_same_dim(view.dim(), q0->dim(), "fisher view/q0");
  if (method == FisherMethod::finite_difference) {
    return detail::fd_hessian(
        [&](const Eigen::VectorXd& t) {
          return expected_log_pdf(view, Gaussian(t, family.noise_cov()));
        },
        theta);
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(view.dim(), view.dim());
  const Eigen::MatrixXd prec = family.noise_llt().solve(eye);
  return ((-prec - prec.transpose()) / 2.0).eval();
}

}  // namespace beliefinfo
