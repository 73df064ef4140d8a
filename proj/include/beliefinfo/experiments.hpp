#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beliefinfo/gaussian.hpp"
#include "beliefinfo/info_value.hpp"

// Repeated-inference simulation. Each experiment draws a ground truth from the
// prior, observes batches through the location model, runs the conjugate
// update over cumulative batches, and assesses the first inference inside the
// view of every stage posterior plus the sharp realization limit.
//
// Values are stored in nats; unit conversion happens at serialization. Every
// random draw comes from a stream keyed by (master_seed, experiment index,
// stage), so results are byte-identical for any worker count.

namespace beliefinfo {

enum class Scenario { genuine, inconsistent };

struct HistogramSpec {
  double lo_bits = -20.0;
  double hi_bits = 20.0;
  int bins = 400;
};

struct ExperimentConfig {
  int dim = 2;
  std::optional<Gaussian> prior;        // defaults to N(0, I_dim)
  double noise_sigma = 0.5;             // isotropic observation noise std dev
  std::vector<int> batch_sizes{10, 10, 20, 40};
  std::int64_t num_experiments = 100000;
  std::uint64_t master_seed = 0;
  Scenario scenario = Scenario::genuine;
  HistogramSpec histogram;
};

Gaussian resolve_prior(const ExperimentConfig& config);
LocationModel resolve_model(const ExperimentConfig& config);

struct ExperimentRecord {
  std::int64_t id = 0;
  Eigen::VectorXd true_theta;
  std::optional<Eigen::VectorXd> alt_theta;  // ground truth of batch 1 when inconsistent
  std::vector<Eigen::VectorXd> batch_means;
  std::vector<Gaussian> stage_posteriors;
  std::vector<double> first_inference_info;  // nats, one entry per stage
  double realization_limit_info = 0.0;       // nats
};

ExperimentRecord run_experiment(const ExperimentConfig& config, std::int64_t index);

struct StageSummary {
  double mean = 0.0;      // nats
  double variance = 0.0;  // nats^2, sample variance
  double fraction_negative = 0.0;
  std::int64_t argmin_id = 0;
  double min = 0.0;
  std::int64_t argmax_id = 0;
  double max = 0.0;
  std::vector<std::int64_t> histogram;  // equal-width bins over bits, edges clamped
};

struct LaplaceFit {
  double location = 0.0;  // sample median
  double scale = 0.0;     // mean absolute deviation from the median
};

// Fits by (median, mean |x - median|), the maximum-likelihood pair.
LaplaceFit laplace_fit(std::vector<double> values);

struct EnsembleSummary {
  std::int64_t num_experiments = 0;
  std::uint64_t master_seed = 0;
  Scenario scenario = Scenario::genuine;
  HistogramSpec histogram;
  double mutual_info = 0.0;       // nats, stage-1 design value
  double covariance_floor = 0.0;  // nats, data-independent part of stage-1 info
  std::vector<StageSummary> stages;
  StageSummary realization;
  LaplaceFit realization_laplace;  // over nats
};

// Compact per-record row kept when callers want the full table.
struct RecordRow {
  std::int64_t id;
  Eigen::VectorXd true_theta;
  std::vector<double> stage_info;  // nats
  double realization_info;         // nats
};

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<RecordRow> rows;  // populated only when requested
};

EnsembleResult run_ensemble(const ExperimentConfig& config, int jobs, bool keep_rows = false);

// Information bound chain for one realized batch:
//   KL(post-predictive, prior-predictive)   no more than
//   KL(posterior, prior)                    no more than
//   log predictive density ratio at the realized mean.
struct BoundsAudit {
  double predictive_gain = 0.0;  // nats
  double model_gain = 0.0;       // nats
  double realized_gain = 0.0;    // nats
  bool pass = false;             // both inequalities within 1e-9 slack
};

BoundsAudit bounds_audit(const Gaussian& prior, const LocationModel& model, Eigen::Index n,
                         const Eigen::VectorXd& ybar);

// Audits stage 1 of a recorded experiment.
BoundsAudit bounds_audit(const ExperimentConfig& config, const ExperimentRecord& record);

}  // namespace beliefinfo
