#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beliefinfo/critical.hpp"
#include "beliefinfo/gaussian.hpp"
#include "beliefinfo/rng.hpp"
#include "test_support.hpp"

using namespace beliefinfo;
using testsupport::close;
using testsupport::rel_close;

namespace {

Gaussian g1(double mean, double var) {
  Eigen::VectorXd m(1);
  m << mean;
  Eigen::MatrixXd c(1, 1);
  c << var;
  return Gaussian(std::move(m), std::move(c));
}

LocationModel model1(double var) {
  Eigen::MatrixXd c(1, 1);
  c << var;
  return LocationModel(std::move(c));
}

Gaussian standard(Eigen::Index d) {
  return Gaussian(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

// Composite Simpson for scalar-Gaussian expectations; 4000 panels over +/-10
// view sigmas keeps the rule error far below the 1e-6 comparisons below.
double simpson_info(const Gaussian& view, const Gaussian& q1, const Gaussian& q0) {
  const double m = view.mean()[0];
  const double s = std::sqrt(view.cov()(0, 0));
  const double lo = m - 10.0 * s;
  const double hi = m + 10.0 * s;
  const int n = 4000;
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    Eigen::VectorXd p(1);
    p << x;
    return std::exp(view.log_pdf(p)) * (q1.log_pdf(p) - q0.log_pdf(p));
  };
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

constexpr double kLn41 = 3.7135720667043078;
constexpr double kFloorNats = 2.7379623106067468;   // ln 41 - 40/41
constexpr double kFloorBits = 3.9500446476532413;

}  // namespace

TEST_CASE("Gaussian: construction, log_pdf, SPD and symmetry rejection") {
  const Gaussian std1 = standard(1);
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
  CHECK(close(std1.log_pdf(origin), -0.5 * std::log(2.0 * std::numbers::pi), 1e-15));
  CHECK(close(std1.log_det_cov(), 0.0, 1e-15));

  Eigen::VectorXd pt(1);
  pt << 2.0;
  CHECK(close(std1.log_pdf(pt), -0.5 * std::log(2.0 * std::numbers::pi) - 2.0, 1e-14));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(Gaussian(Eigen::VectorXd::Zero(2), asym), Error);

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  try {
    Gaussian(Eigen::VectorXd::Zero(2), indef);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_spd);
  }

  CHECK_THROWS_AS(Gaussian(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)), Error);
  CHECK_THROWS_AS(standard(2).log_pdf(Eigen::VectorXd::Zero(3)), Error);
  CHECK_THROWS_AS(LocationModel{indef}, Error);
}

TEST_CASE("posterior: conjugate update closed forms") {
  // Scalar: prior N(0,1), unit noise, one observation at 2 -> N(1, 1/2).
  const Gaussian p1 = posterior(g1(0.0, 1.0), model1(1.0), 1, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(close(p1.mean()[0], 1.0, 1e-14));
  CHECK(close(p1.cov()(0, 0), 0.5, 1e-14));

  // Planar: prior I, noise I/4, ten observations at the origin -> N(0, I/41).
  const Gaussian prior = standard(2);
  const LocationModel model(0.25 * Eigen::MatrixXd::Identity(2, 2));
  const Gaussian p2 = posterior(prior, model, 10, Eigen::VectorXd::Zero(2));
  CHECK(close(p2.mean().norm(), 0.0, 1e-14));
  CHECK(close(p2.cov()(0, 0), 1.0 / 41.0, 1e-15));
  CHECK(close(p2.cov()(1, 1), 1.0 / 41.0, 1e-15));
  CHECK(close(p2.cov()(0, 1), 0.0, 1e-16));

  // n = 0 reproduces the prior to roundoff.
  const Gaussian p0 = posterior(prior, model, 0, Eigen::VectorXd::Constant(2, 7.0));
  CHECK(close((p0.mean() - prior.mean()).norm(), 0.0, 1e-12));
  CHECK(close((p0.cov() - prior.cov()).norm(), 0.0, 1e-12));

  // Huge batches pin the posterior to the sample mean.
  Eigen::VectorXd ybar(2);
  ybar << 0.3, -1.2;
  const Gaussian pn = posterior(prior, model, 1000000, ybar);
  CHECK(close((pn.mean() - ybar).norm(), 0.0, 1e-5));
  CHECK(pn.cov()(0, 0) < 1e-6);

  CHECK_THROWS_AS(posterior(prior, model, -1, ybar), Error);
  CHECK_THROWS_AS(posterior(prior, model, 1, Eigen::VectorXd::Zero(3)), Error);
  CHECK_THROWS_AS(posterior(standard(3), model, 1, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("predictive: batch-mean marginal") {
  const Gaussian s = predictive(g1(0.0, 1.0), model1(1.25), 1);
  CHECK(close(s.cov()(0, 0), 2.25, 1e-15));
  CHECK(close(s.mean()[0], 0.0, 1e-16));

  const Gaussian prior = standard(2);
  const LocationModel model(0.25 * Eigen::MatrixXd::Identity(2, 2));
  const Gaussian m = predictive(prior, model, 10);
  CHECK(close(m.cov()(0, 0), 1.025, 1e-15));
  CHECK(close(m.cov()(1, 0), 0.0, 1e-16));

  CHECK_THROWS_AS(predictive(prior, model, 0), Error);
}

TEST_CASE("mutual_info_gaussian: analytic values") {
  const Gaussian prior = standard(2);
  const LocationModel model(0.25 * Eigen::MatrixXd::Identity(2, 2));
  const InfoValue mi = mutual_info_gaussian(prior, model, 10);
  CHECK(rel_close(mi.nats, kLn41, 1e-12));
  CHECK(rel_close(mi.bits(), 5.3575520046180837, 1e-12));

  // Scalar: 1/2 ln(1 + 3) = ln 2, i.e. exactly one bit.
  CHECK(rel_close(mutual_info_gaussian(g1(0.0, 1.0), model1(1.0), 3).bits(), 1.0, 1e-12));

  CHECK(mutual_info_gaussian(prior, model, 0).nats == 0.0);
  CHECK_THROWS_AS(mutual_info_gaussian(prior, model, -2), Error);

  // Monotone in n: more observations can only be worth more in expectation.
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double cur = mutual_info_gaussian(prior, model, n).nats;
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("info_gaussian_view: closed form against quadrature and decomposition") {
  const Gaussian prior = standard(2);
  const LocationModel model(0.25 * Eigen::MatrixXd::Identity(2, 2));
  const Gaussian post = posterior(prior, model, 10, Eigen::VectorXd::Zero(2));

  // Mean-matched posterior-vs-prior: 1/2 (2 ln 41 + 2/41 - 2) = ln 41 - 40/41.
  const Gaussian shrunk(prior.mean(), post.cov());
  const InfoValue floor_info = info_gaussian_view(shrunk, shrunk, prior);
  CHECK(close(floor_info.nats, kFloorNats, 1e-12));
  CHECK(close(floor_info.bits(), kFloorBits, 1e-12));

  CHECK(info_gaussian_view(post, post, post).nats == 0.0);

  SplitMix64 rng(0x9fb21c65u);
  for (int trial = 0; trial < 100; ++trial) {
    const Gaussian view = testsupport::random_gaussian(rng, 1);
    const Gaussian q1 = testsupport::random_gaussian(rng, 1);
    const Gaussian q0 = testsupport::random_gaussian(rng, 1);
    const double closed = info_gaussian_view(view, q1, q0).nats;
    CHECK(close(closed, simpson_info(view, q1, q0), 1e-6));
    CHECK(close(closed, expected_log_pdf(view, q1) - expected_log_pdf(view, q0), 1e-11));
  }

  CHECK_THROWS_AS(info_gaussian_view(standard(2), standard(3), standard(2)), Error);
}

TEST_CASE("info_gaussian_view: additive over intermediate beliefs") {
  SplitMix64 rng(0x51ab03e7u);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.next() % 3);
    const Gaussian view = testsupport::random_gaussian(rng, d);
    const Gaussian qa = testsupport::random_gaussian(rng, d);
    const Gaussian qb = testsupport::random_gaussian(rng, d);
    const Gaussian qc = testsupport::random_gaussian(rng, d);
    const double whole = info_gaussian_view(view, qc, qa).nats;
    const double split =
        info_gaussian_view(view, qc, qb).nats + info_gaussian_view(view, qb, qa).nats;
    CHECK(close(whole, split, 1e-9));
  }
}

TEST_CASE("kl_gaussian: values and self-distance") {
  CHECK(close(kl_gaussian(g1(1.0, 1.0), g1(0.0, 1.0)).nats, 0.5, 1e-14));

  const Gaussian prior = standard(2);
  const Gaussian shrunk(prior.mean(), (1.0 / 41.0) * Eigen::MatrixXd::Identity(2, 2));
  CHECK(close(kl_gaussian(shrunk, prior).bits(), kFloorBits, 1e-12));
  CHECK(kl_gaussian(prior, prior).nats == 0.0);

  SplitMix64 rng(0x7c4d9a2fu);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.next() % 3);
    const Gaussian a = testsupport::random_gaussian(rng, d);
    const Gaussian b = testsupport::random_gaussian(rng, d);
    CHECK(kl_gaussian(a, b).nats >= -1e-12);
  }
}

TEST_CASE("realization_limit_info: log density ratios") {
  const Gaussian prior = standard(2);
  const Gaussian shrunk(prior.mean(), (1.0 / 41.0) * Eigen::MatrixXd::Identity(2, 2));
  CHECK(close(realization_limit_info(Eigen::VectorXd::Zero(2), shrunk, prior).nats, kLn41,
              1e-13));

  // Scalar posterior N(1, 1/2) against prior N(0, 1), realized at theta = 1:
  // 1/2 ln 2 + 1/2.
  Eigen::VectorXd theta(1);
  theta << 1.0;
  CHECK(close(realization_limit_info(theta, g1(1.0, 0.5), g1(0.0, 1.0)).nats,
              0.84657359027997265, 1e-14));

  CHECK_THROWS_AS(realization_limit_info(Eigen::VectorXd::Zero(2), standard(2), standard(3)),
                  Error);
}

TEST_CASE("posterior KL averaged over the predictive recovers the mutual information") {
  const Gaussian prior = standard(2);
  const LocationModel model(0.25 * Eigen::MatrixXd::Identity(2, 2));
  const Eigen::Index n = 10;
  const double mi = mutual_info_gaussian(prior, model, n).nats;
  const Gaussian marginal = predictive(prior, model, n);

  SplitMix64 rng = keyed_stream(0x1d0c5e3fu, 0, 0);
  const int draws = 100000;
  CompensatedSum<double> sum;
  CompensatedSum<double> sumsq;
  for (int i = 0; i < draws; ++i) {
    const Eigen::VectorXd ybar = sample(marginal, rng);
    const double gain = kl_gaussian(posterior(prior, model, n, ybar), prior).nats;
    sum.add(gain);
    sumsq.add(gain * gain);
  }
  const double mean = sum.value() / draws;
  const double var = (sumsq.value() - draws * mean * mean) / (draws - 1);
  const double se = std::sqrt(var / draws);
  CHECK(std::abs(mean - mi) <= 4.0 * se);
}
