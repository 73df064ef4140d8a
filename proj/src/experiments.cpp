#include "beliefinfo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "beliefinfo/errors.hpp"
#include "beliefinfo/numeric.hpp"
#include "beliefinfo/rng.hpp"

namespace beliefinfo {

namespace {

// Stream layout per experiment. Batch k uses stage kBatchBase + k so adding
// stages never perturbs earlier draws.
constexpr std::uint64_t kStageTheta = 0;
constexpr std::uint64_t kStageAltTheta = 1;
constexpr std::uint64_t kStageBatchBase = 2;

void validate(const ExperimentConfig& config) {
  if (config.dim < 1) fail(errc::bad_input, "dimension must be >= 1");
  if (!(config.noise_sigma > 0.0)) fail(errc::bad_input, "noise sigma must be positive");
  if (config.batch_sizes.empty()) fail(errc::bad_input, "at least one batch is required");
  for (int b : config.batch_sizes) {
    if (b < 1) fail(errc::bad_input, "batch sizes must be >= 1");
  }
  if (config.num_experiments < 1) fail(errc::bad_input, "need at least one experiment");
  if (config.histogram.bins < 1 || !(config.histogram.hi_bits > config.histogram.lo_bits)) {
    fail(errc::bad_input, "histogram needs bins >= 1 and hi > lo");
  }
  if (config.prior && config.prior->dim() != config.dim) {
    fail(errc::dimension_mismatch, "prior dimension does not match config.dim");
  }
}

}  // namespace

Gaussian resolve_prior(const ExperimentConfig& config) {
  if (config.prior) return *config.prior;
  return Gaussian(Eigen::VectorXd::Zero(config.dim),
                  Eigen::MatrixXd::Identity(config.dim, config.dim));
}

LocationModel resolve_model(const ExperimentConfig& config) {
  return LocationModel(config.noise_sigma * config.noise_sigma *
                       Eigen::MatrixXd::Identity(config.dim, config.dim));
}

ExperimentRecord run_experiment(const ExperimentConfig& config, std::int64_t index) {
  validate(config);
  if (index < 0 || index >= config.num_experiments) {
    fail(errc::index_out_of_range, "experiment index outside the ensemble");
  }
  const Gaussian prior = resolve_prior(config);
  const LocationModel model = resolve_model(config);
  const auto seed = config.master_seed;
  const auto uidx = static_cast<std::uint64_t>(index);

  ExperimentRecord rec;
  rec.id = index;
  {
    SplitMix64 rng = keyed_stream(seed, uidx, kStageTheta);
    rec.true_theta = sample(prior, rng);
  }
  if (config.scenario == Scenario::inconsistent) {
    SplitMix64 rng = keyed_stream(seed, uidx, kStageAltTheta);
    rec.alt_theta = sample(prior, rng);
  }

  const std::size_t stages = config.batch_sizes.size();
  rec.batch_means.reserve(stages);
  rec.stage_posteriors.reserve(stages);
  rec.first_inference_info.reserve(stages);

  Gaussian belief = prior;
  for (std::size_t k = 0; k < stages; ++k) {
    const int n = config.batch_sizes[k];
    const Eigen::VectorXd& center =
        (k == 0 && rec.alt_theta) ? *rec.alt_theta : rec.true_theta;
    // The batch mean is a sufficient statistic; draw it directly from
    // N(center, Sigma/n).
    SplitMix64 rng = keyed_stream(seed, uidx, kStageBatchBase + k);
    Eigen::VectorXd z(config.dim);
    fill_standard_normal(z, rng);
    const Eigen::VectorXd ybar =
        center + (model.noise_llt().matrixL() * z) / std::sqrt(static_cast<double>(n));

    belief = posterior(belief, model, n, ybar);
    rec.batch_means.push_back(ybar);
    rec.stage_posteriors.push_back(belief);
    rec.first_inference_info.push_back(
        info_gaussian_view(belief, rec.stage_posteriors.front(), prior).nats);
  }
  rec.realization_limit_info =
      realization_limit_info(rec.true_theta, rec.stage_posteriors.front(), prior).nats;
  return rec;
}

LaplaceFit laplace_fit(std::vector<double> values) {
  if (values.empty()) fail(errc::empty_input, "cannot fit an empty sample");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double median = values[mid];
  if (n % 2 == 0) {
    const double below =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    median = below + (median - below) / 2.0;
  }
  CompensatedSum<double> acc;
  for (double v : values) acc.add(std::abs(v - median));
  return {median, acc.value() / static_cast<double>(n)};
}

namespace {

struct StageAccumulator {
  explicit StageAccumulator(const HistogramSpec& spec)
      : histogram(static_cast<std::size_t>(spec.bins), 0), spec_(spec) {}

  void add(std::int64_t id, double nats) {
    sum.add(nats);
    if (nats < 0.0) ++negatives;
    if (count == 0 || nats < min) { min = nats; argmin = id; }
    if (count == 0 || nats > max) { max = nats; argmax = id; }
    ++count;

    const double bits = nats_to(nats, Unit::bits);
    const double width = (spec_.hi_bits - spec_.lo_bits) / spec_.bins;
    // Off-range mass lands in the edge bins; compare before casting so huge
    // values never reach the float-to-int conversion.
    std::int64_t bin = 0;
    if (bits >= spec_.hi_bits) {
      bin = spec_.bins - 1;
    } else if (bits > spec_.lo_bits) {
      bin = std::min<std::int64_t>(static_cast<std::int64_t>((bits - spec_.lo_bits) / width),
                                   spec_.bins - 1);
    }
    ++histogram[static_cast<std::size_t>(bin)];
  }

  // Second pass around the known mean keeps the variance one-pass-free and
  // order-deterministic.
  StageSummary finish(const double* data, std::int64_t stride, std::int64_t n) const {
    StageSummary s;
    s.mean = sum.value() / static_cast<double>(count);
    CompensatedSum<double> sq;
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = data[i * stride] - s.mean;
      sq.add(d * d);
    }
    s.variance = count > 1 ? sq.value() / static_cast<double>(count - 1) : 0.0;
    s.fraction_negative = static_cast<double>(negatives) / static_cast<double>(count);
    s.argmin_id = argmin;
    s.min = min;
    s.argmax_id = argmax;
    s.max = max;
    s.histogram = histogram;
    return s;
  }

  CompensatedSum<double> sum;
  std::int64_t count = 0;
  std::int64_t negatives = 0;
  double min = 0.0, max = 0.0;
  std::int64_t argmin = 0, argmax = 0;
  std::vector<std::int64_t> histogram;

 private:
  HistogramSpec spec_;
};

}  // namespace

EnsembleResult run_ensemble(const ExperimentConfig& config, int jobs, bool keep_rows) {
  validate(config);
  const auto n = config.num_experiments;
  const auto stages = static_cast<std::int64_t>(config.batch_sizes.size());
  if (jobs < 1) {
    const unsigned hw = std::thread::hardware_concurrency();
    jobs = hw == 0 ? 1 : static_cast<int>(hw);
  }
  jobs = static_cast<int>(std::min<std::int64_t>(jobs, n));

  // Workers fill per-record slots; every reduction below runs single-threaded
  // in index order, which is what makes the output independent of `jobs`.
  std::vector<double> stage_info(static_cast<std::size_t>(n * stages));
  std::vector<double> realization(static_cast<std::size_t>(n));
  std::vector<Eigen::VectorXd> thetas;
  if (keep_rows) thetas.resize(static_cast<std::size_t>(n));

  std::atomic<std::int64_t> cursor{0};
  constexpr std::int64_t kChunk = 64;
  const auto worker = [&] {
    for (;;) {
      const std::int64_t begin = cursor.fetch_add(kChunk);
      if (begin >= n) return;
      const std::int64_t end = std::min(begin + kChunk, n);
      for (std::int64_t i = begin; i < end; ++i) {
        ExperimentRecord rec = run_experiment(config, i);
        for (std::int64_t k = 0; k < stages; ++k) {
          stage_info[static_cast<std::size_t>(i * stages + k)] =
              rec.first_inference_info[static_cast<std::size_t>(k)];
        }
        realization[static_cast<std::size_t>(i)] = rec.realization_limit_info;
        if (keep_rows) thetas[static_cast<std::size_t>(i)] = std::move(rec.true_theta);
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EnsembleResult result;
  EnsembleSummary& summary = result.summary;
  summary.num_experiments = n;
  summary.master_seed = config.master_seed;
  summary.scenario = config.scenario;
  summary.histogram = config.histogram;

  const Gaussian prior = resolve_prior(config);
  const LocationModel model = resolve_model(config);
  summary.mutual_info = mutual_info_gaussian(prior, model, config.batch_sizes.front()).nats;
  {
    // Stage-1 info is floor + 1/2 (mu_B - mu_A)^T A^-1 (mu_B - mu_A); the floor
    // is the posterior-vs-prior KL with the inferred mean held at the prior's,
    // rebuilt with identical means so the quadratic term is exactly zero.
    const Gaussian post0 =
        posterior(prior, model, config.batch_sizes.front(), prior.mean());
    summary.covariance_floor =
        kl_gaussian(Gaussian(prior.mean(), post0.cov()), prior).nats;
  }

  summary.stages.reserve(static_cast<std::size_t>(stages));
  for (std::int64_t k = 0; k < stages; ++k) {
    StageAccumulator acc(config.histogram);
    for (std::int64_t i = 0; i < n; ++i) {
      acc.add(i, stage_info[static_cast<std::size_t>(i * stages + k)]);
    }
    summary.stages.push_back(acc.finish(stage_info.data() + k, stages, n));
  }
  {
    StageAccumulator acc(config.histogram);
    for (std::int64_t i = 0; i < n; ++i) acc.add(i, realization[static_cast<std::size_t>(i)]);
    summary.realization = acc.finish(realization.data(), 1, n);
    summary.realization_laplace = laplace_fit(realization);
  }

  if (keep_rows) {
    result.rows.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      RecordRow row;
      row.id = i;
      row.true_theta = std::move(thetas[static_cast<std::size_t>(i)]);
      row.stage_info.assign(stage_info.begin() + static_cast<std::ptrdiff_t>(i * stages),
                            stage_info.begin() + static_cast<std::ptrdiff_t>((i + 1) * stages));
      row.realization_info = realization[static_cast<std::size_t>(i)];
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

BoundsAudit bounds_audit(const Gaussian& prior, const LocationModel& model, Eigen::Index n,
                         const Eigen::VectorXd& ybar) {
  BoundsAudit audit;
  if (n == 0) {
    audit.pass = true;  // no data: posterior is the prior and every gain is zero
    return audit;
  }
  const Gaussian post = posterior(prior, model, n, ybar);
  const Gaussian prior_pred = predictive(prior, model, n);
  const Gaussian post_pred = predictive(post, model, n);
  audit.predictive_gain = kl_gaussian(post_pred, prior_pred).nats;
  audit.model_gain = kl_gaussian(post, prior).nats;
  audit.realized_gain = realization_limit_info(ybar, post_pred, prior_pred).nats;
  audit.pass = audit.predictive_gain <= audit.model_gain + 1e-9 &&
               audit.model_gain <= audit.realized_gain + 1e-9;
  return audit;
}

BoundsAudit bounds_audit(const ExperimentConfig& config, const ExperimentRecord& record) {
  if (record.batch_means.empty()) fail(errc::empty_input, "record carries no batch data");
  return bounds_audit(resolve_prior(config), resolve_model(config), config.batch_sizes.front(),
                      record.batch_means.front());
}

}  // namespace beliefinfo
