#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "beliefinfo/categorical.hpp"
#include "beliefinfo/info_value.hpp"

// Per-record label information for classifier predictions. For a record with
// predicted class probabilities p and claimed label y, relative to a baseline
// belief b (uniform unless given):
//
//   predictive = log2(p[y] / b[y])      what the prediction says about y
//   residual   = log2(1 / p[y])         what remains unresolved
//   total      = log2(1 / b[y])         fixed by the baseline alone
//
// predictive + residual = total holds per record to roundoff; negative
// predictive information flags labels the predictor argues against.

namespace beliefinfo {

struct PredictionRecord {
  std::string id;
  int label = 0;
  Eigen::ArrayXd probs;
  std::optional<Eigen::ArrayXd> baseline;  // defaults to uniform over the classes
};

InfoValue predictive_label_info(const Categorical& probs, const Categorical& baseline, int label);
InfoValue residual_label_info(const Categorical& probs, int label);

// Population-level expected predictive information when labels are drawn from
// q1: the divergence of q1 from the baseline.
InfoValue generative_predictive_info(const Categorical& q1, const BeliefWeights& q0);

struct LabelRecordInfo {
  std::string id;
  int label = 0;
  double predictive_bits = 0.0;  // +-inf allowed
  double residual_bits = 0.0;
  double total_bits = 0.0;
  bool negative = false;
};

struct LabelInfoSummary {
  std::int64_t count = 0;
  std::int64_t infinite_records = 0;    // excluded from the mean, counted here
  double mean_predictive_bits = 0.0;    // over finite records
  double fraction_negative = 0.0;
  double histogram_lo_bits = -20.0;
  double histogram_hi_bits = 20.0;
  std::vector<std::int64_t> histogram;  // predictive bits, edges clamped
};

struct LabelInfoReport {
  std::vector<LabelRecordInfo> records;   // input order
  std::vector<std::string> ranking;       // ids by ascending predictive info
  LabelInfoSummary summary;
};

LabelInfoReport analyze(const std::vector<PredictionRecord>& records, int histogram_bins = 200);

struct SyntheticCorpus {
  std::vector<PredictionRecord> records;
  std::vector<std::uint8_t> mislabeled;  // ground truth, parallel to records
};

// Each record puts `confidence` on a uniformly drawn true class and spreads
// the remainder evenly; the claimed label is wrong with probability
// mislabel_fraction (uniform over wrong classes). confidence must exceed 1/k
// so correct and incorrect labels have strictly opposite predictive signs.
SyntheticCorpus generate_synthetic(std::int64_t num_records, int num_classes, double confidence,
                                   double mislabel_fraction, std::uint64_t seed);

// CSV schema: header id,label,p0,...,p{k-1}[,baseline0,...,baseline{k-1}].
// Probability rows are renormalized when their sum is within 1e-6 of one and
// rejected otherwise.
std::vector<PredictionRecord> read_prediction_csv(std::istream& in);
void write_prediction_csv(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_record_info_csv(std::ostream& out, const std::vector<LabelRecordInfo>& records);
void write_truth_csv(std::ostream& out, const SyntheticCorpus& corpus);

}  // namespace beliefinfo
