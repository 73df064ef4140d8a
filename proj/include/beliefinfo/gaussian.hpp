#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "beliefinfo/errors.hpp"
#include "beliefinfo/info_value.hpp"

// Multivariate Gaussian beliefs and the conjugate location model. Covariances
// are Cholesky-factored once at construction; a failed factorization is the
// SPD test. Log-determinants come from factor diagonals and every inverse
// application is a factor solve.

namespace beliefinfo {

template <typename Scalar>
class GaussianT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  // cov must be symmetric within 1e-10 relative to its largest entry; it is
  // symmetrized before factoring so downstream algebra sees one matrix.
  GaussianT(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
      fail(errc::dimension_mismatch, "mean of size " + std::to_string(mean_.size()) +
                                         " with covariance " + std::to_string(cov_.rows()) + "x" +
                                         std::to_string(cov_.cols()));
    }
    const Scalar scale = std::max(Scalar(1), cov_.template lpNorm<Eigen::Infinity>());
    if ((cov_ - cov_.transpose()).template lpNorm<Eigen::Infinity>() > Scalar(1e-10) * scale) {
      fail(errc::not_spd, "covariance is not symmetric");
    }
    cov_ = ((cov_ + cov_.transpose()) / Scalar(2)).eval();
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) {
      fail(errc::not_spd, "covariance is not positive definite");
    }
    log_det_ = Scalar(2) * llt_.matrixLLT().diagonal().array().log().sum();
  }

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  const Eigen::LLT<Matrix>& llt() const noexcept { return llt_; }
  Scalar log_det_cov() const noexcept { return log_det_; }

  Scalar log_pdf(const Vector& x) const {
    if (x.size() != dim()) fail(errc::dimension_mismatch, "point dimension mismatch");
    const Vector d = x - mean_;
    const Scalar quad = d.dot(llt_.solve(d));
    return Scalar(-0.5) *
           (Scalar(dim()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) + log_det_ + quad);
  }

 private:
  Vector mean_;
  Matrix cov_;
  Eigen::LLT<Matrix> llt_;
  Scalar log_det_{0};
};

// Observation model Y = theta + noise with fixed SPD noise covariance; a batch
// of n draws is summarized by its mean, distributed N(theta, noise/n).
template <typename Scalar>
class LocationModelT {
 public:
  using Matrix = typename GaussianT<Scalar>::Matrix;
  using Vector = typename GaussianT<Scalar>::Vector;

  explicit LocationModelT(Matrix noise_cov) : noise_(centered(std::move(noise_cov))) {}

  Eigen::Index dim() const noexcept { return noise_.dim(); }
  const Matrix& noise_cov() const noexcept { return noise_.cov(); }
  const Eigen::LLT<Matrix>& noise_llt() const noexcept { return noise_.llt(); }

 private:
  static GaussianT<Scalar> centered(Matrix cov) {
    Vector zero = Vector::Zero(cov.rows());
    return GaussianT<Scalar>(std::move(zero), std::move(cov));
  }

  GaussianT<Scalar> noise_;  // reuses the SPD validation and factorization
};

using Gaussian = GaussianT<double>;
using LocationModel = LocationModelT<double>;

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    fail(errc::dimension_mismatch, std::string(what) + ": dimensions " + std::to_string(a) +
                                       " and " + std::to_string(b) + " differ");
  }
}

}  // namespace detail

// Conjugate update for n observations with batch mean ybar:
//   B^-1 = A^-1 + n * Sigma^-1,   mu_B = B (A^-1 mu_A + n Sigma^-1 ybar).
// n = 0 reproduces the prior.
inline Gaussian posterior(const Gaussian& prior, const LocationModel& model, Eigen::Index n,
                          const Eigen::VectorXd& ybar) {
  detail::require_same_dim(prior.dim(), model.dim(), "posterior prior/model");
  detail::require_same_dim(prior.dim(), ybar.size(), "posterior prior/ybar");
  if (n < 0) fail(errc::bad_input, "negative observation count");

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(prior.dim(), prior.dim());
  const Eigen::MatrixXd prior_prec = prior.llt().solve(eye);
  const Eigen::MatrixXd noise_prec = model.noise_llt().solve(eye);
  Eigen::MatrixXd prec = prior_prec + double(n) * noise_prec;
  prec = ((prec + prec.transpose()) / 2.0).eval();
  Eigen::LLT<Eigen::MatrixXd> prec_llt(prec);
  if (prec_llt.info() != Eigen::Success) {
    fail(errc::not_spd, "posterior precision failed to factor");
  }
  const Eigen::VectorXd h = prior_prec * prior.mean() + double(n) * (noise_prec * ybar);
  return Gaussian(prec_llt.solve(h), prec_llt.solve(eye));
}

// Marginal distribution of the batch mean before observing: N(mu_A, A + Sigma/n).
inline Gaussian predictive(const Gaussian& prior, const LocationModel& model, Eigen::Index n) {
  detail::require_same_dim(prior.dim(), model.dim(), "predictive prior/model");
  if (n < 1) fail(errc::bad_input, "predictive needs n >= 1");
  return Gaussian(prior.mean(), prior.cov() + model.noise_cov() / double(n));
}

// Expected information carried by a size-n batch about theta:
//   1/2 ln det(n Sigma^-1 A + I), computed as
//   1/2 [ln det(A^-1 + n Sigma^-1) + ln det A] so both factors are SPD.
inline InfoValue mutual_info_gaussian(const Gaussian& prior, const LocationModel& model,
                                      Eigen::Index n) {
  detail::require_same_dim(prior.dim(), model.dim(), "mutual_info prior/model");
  if (n < 0) fail(errc::bad_input, "negative observation count");
  if (n == 0) return {0.0};

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(prior.dim(), prior.dim());
  Eigen::MatrixXd prec = prior.llt().solve(eye) + double(n) * model.noise_llt().solve(eye);
  prec = ((prec + prec.transpose()) / 2.0).eval();
  Eigen::LLT<Eigen::MatrixXd> prec_llt(prec);
  if (prec_llt.info() != Eigen::Success) {
    fail(errc::not_spd, "information matrix failed to factor");
  }
  const double log_det_prec = 2.0 * prec_llt.matrixLLT().diagonal().array().log().sum();
  return {0.5 * (log_det_prec + prior.log_det_cov())};
}

// E_view[ln g(x)] for Gaussian view N(nu, C):
//   -1/2 [d ln 2pi + ln det G + tr(G^-1 C) + (nu - m)^T G^-1 (nu - m)].
inline double expected_log_pdf(const Gaussian& view, const Gaussian& g) {
  detail::require_same_dim(view.dim(), g.dim(), "expected_log_pdf view/g");
  const Eigen::VectorXd d = view.mean() - g.mean();
  const double quad = d.dot(g.llt().solve(d));
  const double trace = g.llt().solve(view.cov()).trace();
  return -0.5 * (double(view.dim()) * std::log(2.0 * std::numbers::pi) + g.log_det_cov() +
                 trace + quad);
}

// I(view; q1; q0) for Gaussian beliefs:
//   1/2 [ln det(A B^-1) + tr((A^-1 - B^-1) C)
//        + (nu - mu_A)^T A^-1 (nu - mu_A) - (nu - mu_B)^T B^-1 (nu - mu_B)].
// Always finite: Gaussian supports coincide.
inline InfoValue info_gaussian_view(const Gaussian& view, const Gaussian& q1,
                                    const Gaussian& q0) {
  detail::require_same_dim(view.dim(), q1.dim(), "info_gaussian_view view/q1");
  detail::require_same_dim(view.dim(), q0.dim(), "info_gaussian_view view/q0");
  const double log_det_term = q0.log_det_cov() - q1.log_det_cov();
  const double trace_term =
      q0.llt().solve(view.cov()).trace() - q1.llt().solve(view.cov()).trace();
  const Eigen::VectorXd d0 = view.mean() - q0.mean();
  const Eigen::VectorXd d1 = view.mean() - q1.mean();
  const double quad0 = d0.dot(q0.llt().solve(d0));
  const double quad1 = d1.dot(q1.llt().solve(d1));
  return {0.5 * (log_det_term + trace_term + quad0 - quad1)};
}

inline InfoValue kl_gaussian(const Gaussian& q1, const Gaussian& q0) {
  return info_gaussian_view(q1, q1, q0);
}

// Log density ratio at a realized point; the sharp-view limit of info.
inline InfoValue realization_limit_info(const Eigen::VectorXd& point, const Gaussian& q1,
                                        const Gaussian& q0) {
  detail::require_same_dim(q1.dim(), q0.dim(), "realization_limit q1/q0");
  return {q1.log_pdf(point) - q0.log_pdf(point)};
}

}  // namespace beliefinfo
