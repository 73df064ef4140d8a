#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "beliefinfo/categorical.hpp"
#include "beliefinfo/errors.hpp"
#include "beliefinfo/gaussian.hpp"
#include "beliefinfo/measures.hpp"

// Critical (stationary) beliefs under expectation constraints. The minimizer
// of I(r; r; q0) subject to E_r[f_i] = phi_i is the exponential tilt
// r* ~ q0 * exp(sum_i lambda_i f_i); the multipliers are found by a damped
// Newton iteration on the dual log-partition, which is smooth and convex.

namespace beliefinfo {

struct ExpectationConstraint {
  Eigen::VectorXd kernel;  // f_i evaluated on every outcome
  double target;           // required expectation phi_i
};

struct CriticalSolution {
  Categorical distribution;
  Eigen::VectorXd lambda;  // one multiplier per constraint
  double residual;         // max_i |E_r[f_i] - phi_i| at the returned r
  int iterations;
};

namespace detail {

struct DualState {
  Eigen::ArrayXd r;        // current tilt, normalized on the support
  Eigen::VectorXd grad;    // E_r[g] with centered kernels g = f - phi
  double log_partition;
};

// Evaluates the dual at lambda with max-subtraction so exp never overflows.
inline DualState eval_dual(const Eigen::ArrayXd& log_q0, const Eigen::MatrixXd& centered,
                           const Eigen::VectorXd& lambda) {
  DualState s;
  Eigen::ArrayXd w = log_q0 + (centered * lambda).array();
  const double m = w.maxCoeff();
  const Eigen::ArrayXd e = (w - m).exp();
  const double z = e.sum();
  s.r = e / z;
  s.grad = centered.transpose() * s.r.matrix();
  s.log_partition = m + std::log(z);
  return s;
}

}  // namespace detail

// q0 may be unnormalized; zero-weight outcomes stay at zero in the solution.
// Stops when the constraint residual drops to tol in the infinity norm.
inline CriticalSolution min_info_distribution(const BeliefWeights& q0,
                                              const std::vector<ExpectationConstraint>& constraints,
                                              double tol = 1e-10, int max_iterations = 200) {
  const Eigen::Index n = q0.size();
  const int m = static_cast<int>(constraints.size());
  for (const auto& c : constraints) {
    if (c.kernel.size() != n) {
      fail(errc::dimension_mismatch, "constraint kernel size " + std::to_string(c.kernel.size()) +
                                         " does not match support size " + std::to_string(n));
    }
    if (!c.kernel.allFinite() || !std::isfinite(c.target)) {
      fail(errc::bad_input, "constraint kernel and target must be finite");
    }
  }

  if (m == 0) {
    return {Categorical::normalized(q0.weights()), Eigen::VectorXd(0), 0.0, 0};
  }

  // Restrict to the support of q0; everything else carries zero mass.
  std::vector<Eigen::Index> support;
  support.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q0[i] > 0.0) support.push_back(i);
  }
  const Eigen::Index ns = static_cast<Eigen::Index>(support.size());

  Eigen::ArrayXd log_q0(ns);
  Eigen::MatrixXd centered(ns, m);
  for (Eigen::Index s = 0; s < ns; ++s) {
    log_q0[s] = std::log(q0[support[static_cast<std::size_t>(s)]]);
    for (int j = 0; j < m; ++j) {
      centered(s, j) = constraints[static_cast<std::size_t>(j)].kernel[support[static_cast<std::size_t>(s)]] -
                       constraints[static_cast<std::size_t>(j)].target;
    }
  }

  // A target outside the kernel's range on the support can never be met, and
  // one on the range boundary is met only by a boundary distribution, which
  // no finite exponential tilt reaches. A constant kernel hitting its target
  // exactly (lo == hi == 0) constrains nothing and stays feasible.
  for (int j = 0; j < m; ++j) {
    const double lo = centered.col(j).minCoeff();
    const double hi = centered.col(j).maxCoeff();
    if (lo > 0.0 || hi < 0.0) {
      fail(errc::infeasible, "constraint " + std::to_string(j) + " target outside kernel range");
    }
    if ((lo == 0.0) != (hi == 0.0)) {
      fail(errc::infeasible,
           "constraint " + std::to_string(j) + " target on the boundary of the kernel range");
    }
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  detail::DualState state = detail::eval_dual(log_q0, centered, lambda);
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (state.grad.lpNorm<Eigen::Infinity>() <= tol) break;

    // Newton direction from the covariance of the centered kernels.
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index s = 0; s < ns; ++s) {
      hess.noalias() += state.r[s] * centered.row(s).transpose() * centered.row(s);
    }
    hess.noalias() -= state.grad * state.grad.transpose();

    Eigen::VectorXd step;
    double ridge = 0.0;
    for (;;) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess + ridge * Eigen::MatrixXd::Identity(m, m));
      step = ldlt.solve(-state.grad);
      if (ldlt.info() == Eigen::Success && step.allFinite()) break;
      ridge = ridge == 0.0 ? 1e-10 : ridge * 10.0;
      if (ridge > 1e6) fail(errc::infeasible, "dual Hessian is numerically singular");
    }

    // Backtracking on the dual objective; stalling signals an unreachable
    // target (mass escaping to the boundary of the simplex). The roundoff
    // allowance keeps ulp-level noise from rejecting the last Newton steps,
    // where the predicted decrease sits below double resolution; genuine
    // ascent on an infeasible dual is orders of magnitude larger.
    const double slope = state.grad.dot(step);
    const double fuzz = 4.0 * std::numeric_limits<double>::epsilon() *
                        (1.0 + std::abs(state.log_partition));
    double t = 1.0;
    detail::DualState trial = detail::eval_dual(log_q0, centered, lambda + step);
    while (trial.log_partition > state.log_partition + 1e-4 * t * slope + fuzz) {
      t *= 0.5;
      if (t < 1e-14) fail(errc::infeasible, "dual line search stalled");
      trial = detail::eval_dual(log_q0, centered, lambda + t * step);
    }
    lambda += t * step;
    state = trial;
    if (lambda.lpNorm<Eigen::Infinity>() > 1e6) {
      fail(errc::infeasible, "multipliers diverged; target lies on or outside the feasible boundary");
    }
  }
  if (state.grad.lpNorm<Eigen::Infinity>() > tol) {
    fail(errc::no_convergence,
         "constraint residual " + std::to_string(state.grad.lpNorm<Eigen::Infinity>()) +
             " after " + std::to_string(max_iterations) + " iterations");
  }

  Eigen::ArrayXd full = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index s = 0; s < ns; ++s) full[support[static_cast<std::size_t>(s)]] = state.r[s];
  return {Categorical::normalized(std::move(full)), std::move(lambda),
          state.grad.lpNorm<Eigen::Infinity>(), iter};
}

// Maximum entropy is minimum information relative to unit weights.
inline CriticalSolution max_entropy_distribution(Eigen::Index support_size,
                                                 const std::vector<ExpectationConstraint>& constraints,
                                                 double tol = 1e-10, int max_iterations = 200) {
  return min_info_distribution(BeliefWeights::unit(support_size), constraints, tol, max_iterations);
}

// Belief of minimal self-information whose assessed information about each
// change q0 -> states[i] equals targets[i] (nats). The kernels are the log
// belief ratios, so the solution is q0 * prod_i (states[i]/q0)^lambda_i.
inline CriticalSolution constrained_info_distribution(const BeliefWeights& q0,
                                                      const std::vector<BeliefWeights>& states,
                                                      const std::vector<double>& targets,
                                                      double tol = 1e-10,
                                                      int max_iterations = 200) {
  if (states.size() != targets.size()) {
    fail(errc::bad_input, "constrained_info needs one target per state");
  }
  std::vector<ExpectationConstraint> constraints;
  constraints.reserve(states.size());
  for (std::size_t c = 0; c < states.size(); ++c) {
    const BeliefWeights& q = states[c];
    if (q.size() != q0.size()) {
      fail(errc::support_mismatch,
           "constrained_info state " + std::to_string(c) + "/reference outcome counts differ");
    }
    Eigen::VectorXd kernel(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      if (q0[i] == 0.0) {
        kernel[i] = 0.0;  // off the support; never weighted
      } else if (q[i] == 0.0) {
        fail(errc::undefined_kernel, "log ratio kernel of state " + std::to_string(c) +
                                         " diverges at outcome " + std::to_string(i));
      } else {
        kernel[i] = std::log(q[i] / q0[i]);
      }
    }
    constraints.push_back({std::move(kernel), targets[c]});
  }
  return min_info_distribution(q0, std::move(constraints), tol, max_iterations);
}

// Tempered posterior r_lambda ~ prior * likelihood^lambda. lambda = 0 returns
// the prior unchanged; lambda = 1 is exact Bayes.
inline Categorical anneal(const Categorical& prior, const BeliefWeights& likelihood,
                          double lambda) {
  if (prior.size() != likelihood.size()) {
    fail(errc::support_mismatch, "anneal prior/likelihood outcome counts differ");
  }
  if (!std::isfinite(lambda)) fail(errc::bad_input, "lambda must be finite");
  if (lambda == 0.0) return prior;
  Eigen::ArrayXd w(prior.size());
  for (Eigen::Index i = 0; i < prior.size(); ++i) {
    if (likelihood[i] == 0.0) {
      if (lambda < 0.0 && prior[i] > 0.0) {
        fail(errc::bad_input, "negative lambda needs a positive likelihood on the prior support");
      }
      w[i] = 0.0;
    } else {
      w[i] = lambda == 1.0 ? prior[i] * likelihood[i]
                           : prior[i] * std::pow(likelihood[i], lambda);
    }
  }
  if (!(w.maxCoeff() > 0.0)) {
    fail(errc::degenerate_result, "annealing annihilated all probability mass");
  }
  return Categorical::normalized(std::move(w));
}

struct AnnealingSolution {
  double lambda;
  Categorical annealed;
  double achieved_info;  // I(annealed; posterior; prior) in nats
};

// Finds lambda >= 0 with I(anneal(lambda); posterior; prior) = target_info.
// That map is nondecreasing in lambda (its derivative is a variance), so a
// bisection on [0, 1] is exact enough; targets live in [0, I(post;post;prior)].
inline AnnealingSolution solve_annealing_lambda(const Categorical& prior,
                                                const BeliefWeights& likelihood,
                                                double target_info, double tol = 1e-10,
                                                int max_iterations = 200) {
  if (!std::isfinite(target_info)) fail(errc::bad_input, "target information must be finite");
  const Categorical post = anneal(prior, likelihood, 1.0);
  const BeliefWeights post_w(post);
  const BeliefWeights prior_w(prior);
  const double full = info(post_w, post_w, prior_w).nats;
  if (full <= tol) {
    fail(errc::degenerate_result, "posterior equals prior; no information scale to target");
  }
  if (target_info < -tol || target_info > full + tol) {
    fail(errc::target_out_of_range, "target must lie in [0, " + std::to_string(full) + "] nats");
  }
  if (target_info >= full) {
    return {1.0, post, full};
  }

  const auto assessed = [&](double lam) {
    return info(BeliefWeights(anneal(prior, likelihood, lam)), post_w, prior_w).nats;
  };

  // assessed(0) = -KL(prior || posterior) <= 0 <= target, so [0, 1] brackets.
  double lo = 0.0, hi = 1.0;
  double lam = 0.5, val = 0.0;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    lam = 0.5 * (lo + hi);
    val = assessed(lam);
    if (std::isfinite(val) && std::abs(val - target_info) <= tol) {
      return {lam, anneal(prior, likelihood, lam), val};
    }
    if (val < target_info) {
      lo = lam;
    } else {
      hi = lam;
    }
    if (hi - lo < 1e-16) break;
  }
  fail(errc::no_convergence, "annealing target not bracketed to tolerance after " +
                                 std::to_string(iter) + " bisections");
}

// Conjugate Gaussian tempering: B^-1 = A^-1 + lambda n Sigma^-1, matching the
// discrete anneal applied to a size-n batch likelihood.
inline Gaussian anneal_gaussian(const Gaussian& prior, const LocationModel& model,
                                Eigen::Index n, const Eigen::VectorXd& ybar, double lambda) {
  if (!(lambda >= 0.0)) fail(errc::negative_lambda, "annealing exponent must be >= 0");
  detail::require_same_dim(prior.dim(), model.dim(), "anneal prior/model");
  detail::require_same_dim(prior.dim(), ybar.size(), "anneal prior/ybar");
  if (n < 0) fail(errc::bad_input, "negative observation count");

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(prior.dim(), prior.dim());
  const Eigen::MatrixXd prior_prec = prior.llt().solve(eye);
  const Eigen::MatrixXd noise_prec = model.noise_llt().solve(eye);
  Eigen::MatrixXd prec = prior_prec + lambda * double(n) * noise_prec;
  prec = ((prec + prec.transpose()) / 2.0).eval();
  Eigen::LLT<Eigen::MatrixXd> prec_llt(prec);
  if (prec_llt.info() != Eigen::Success) {
    fail(errc::not_spd, "annealed precision failed to factor");
  }
  const Eigen::VectorXd h = prior_prec * prior.mean() + lambda * double(n) * (noise_prec * ybar);
  return Gaussian(prec_llt.solve(h), prec_llt.solve(eye));
}

}  // namespace beliefinfo
