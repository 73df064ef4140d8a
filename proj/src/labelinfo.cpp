#include "beliefinfo/labelinfo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "beliefinfo/errors.hpp"
#include "beliefinfo/measures.hpp"
#include "beliefinfo/numeric.hpp"
#include "beliefinfo/rng.hpp"

namespace beliefinfo {

namespace {

constexpr double kIngestSumTol = 1e-6;

void check_label(int label, Eigen::Index k, const std::string& id) {
  if (label < 0 || label >= k) {
    fail(errc::index_out_of_range, "record " + id + ": label " + std::to_string(label) +
                                       " outside [0, " + std::to_string(k) + ")");
  }
}

Categorical ingest_probs(const Eigen::ArrayXd& raw, const std::string& id, const char* what) {
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i]) || raw[i] < -1e-12) {
      fail(errc::bad_input, "record " + id + ": bad " + what + " entry at class " +
                                std::to_string(i));
    }
  }
  const double sum = raw.sum();
  if (std::abs(sum - 1.0) > kIngestSumTol) {
    fail(errc::not_normalized,
         "record " + id + ": " + what + " sums to " + std::to_string(sum));
  }
  return Categorical::normalized(raw.max(0.0));
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

InfoValue predictive_label_info(const Categorical& probs, const Categorical& baseline, int label) {
  if (probs.size() != baseline.size()) {
    fail(errc::inconsistent_class_count, "probs and baseline class counts differ");
  }
  check_label(label, probs.size(), "<inline>");
  return info_density(BeliefWeights(probs), BeliefWeights(baseline), label);
}

InfoValue residual_label_info(const Categorical& probs, int label) {
  check_label(label, probs.size(), "<inline>");
  return realization_info(probs, label);
}

InfoValue generative_predictive_info(const Categorical& q1, const BeliefWeights& q0) {
  return kl(q1, q0);
}

LabelInfoReport analyze(const std::vector<PredictionRecord>& records, int histogram_bins) {
  if (records.empty()) fail(errc::empty_input, "no records to analyze");
  if (histogram_bins < 1) fail(errc::bad_input, "histogram needs at least one bin");
  const Eigen::Index k = records.front().probs.size();
  if (k < 2) fail(errc::bad_input, "need at least two classes");

  LabelInfoReport report;
  report.records.reserve(records.size());
  report.summary.histogram.assign(static_cast<std::size_t>(histogram_bins), 0);
  const double lo = report.summary.histogram_lo_bits;
  const double hi = report.summary.histogram_hi_bits;
  const double width = (hi - lo) / histogram_bins;

  CompensatedSum<double> mean_acc;
  std::int64_t finite_count = 0;
  std::int64_t negatives = 0;

  for (const auto& raw : records) {
    if (raw.probs.size() != k || (raw.baseline && raw.baseline->size() != k)) {
      fail(errc::inconsistent_class_count,
           "record " + raw.id + ": class count differs from the corpus");
    }
    const Categorical probs = ingest_probs(raw.probs, raw.id, "probs");
    const Categorical baseline = raw.baseline ? ingest_probs(*raw.baseline, raw.id, "baseline")
                                              : Categorical::uniform(k);
    check_label(raw.label, k, raw.id);

    LabelRecordInfo out;
    out.id = raw.id;
    out.label = raw.label;
    // total is pinned by the baseline alone; predictive and residual are
    // computed independently so their sum genuinely tests the decomposition.
    out.predictive_bits = predictive_label_info(probs, baseline, raw.label).bits();
    out.residual_bits = residual_label_info(probs, raw.label).bits();
    out.total_bits = -std::log(baseline[raw.label]) / std::numbers::ln2;
    out.negative = out.predictive_bits < 0.0;

    if (std::isfinite(out.predictive_bits)) {
      mean_acc.add(out.predictive_bits);
      ++finite_count;
    } else {
      ++report.summary.infinite_records;
    }
    if (out.negative) ++negatives;
    // Infinite and off-range values land in the edge bins; compare before
    // casting so they never reach the float-to-int conversion.
    std::int64_t bin = 0;
    if (out.predictive_bits >= hi) {
      bin = histogram_bins - 1;
    } else if (out.predictive_bits > lo) {
      bin = std::min<std::int64_t>(static_cast<std::int64_t>((out.predictive_bits - lo) / width),
                                   histogram_bins - 1);
    }
    ++report.summary.histogram[static_cast<std::size_t>(bin)];

    report.records.push_back(std::move(out));
  }

  report.summary.count = static_cast<std::int64_t>(records.size());
  report.summary.mean_predictive_bits =
      finite_count > 0 ? mean_acc.value() / static_cast<double>(finite_count) : 0.0;
  report.summary.fraction_negative =
      static_cast<double>(negatives) / static_cast<double>(records.size());

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = report.records[a];
    const auto& rb = report.records[b];
    if (ra.predictive_bits != rb.predictive_bits) {
      return ra.predictive_bits < rb.predictive_bits;
    }
    return ra.id < rb.id;
  });
  report.ranking.reserve(order.size());
  for (std::size_t i : order) report.ranking.push_back(report.records[i].id);
  return report;
}

SyntheticCorpus generate_synthetic(std::int64_t num_records, int num_classes, double confidence,
                                   double mislabel_fraction, std::uint64_t seed) {
  if (num_records < 1) fail(errc::bad_input, "need at least one record");
  if (num_classes < 2) fail(errc::bad_input, "need at least two classes");
  if (!(confidence > 1.0 / num_classes) || !(confidence < 1.0)) {
    fail(errc::bad_input, "confidence must lie in (1/k, 1)");
  }
  if (!(mislabel_fraction >= 0.0) || !(mislabel_fraction <= 1.0)) {
    fail(errc::bad_input, "mislabel fraction must lie in [0, 1]");
  }

  const double off = (1.0 - confidence) / (num_classes - 1);
  SyntheticCorpus corpus;
  corpus.records.reserve(static_cast<std::size_t>(num_records));
  corpus.mislabeled.reserve(static_cast<std::size_t>(num_records));
  for (std::int64_t i = 0; i < num_records; ++i) {
    SplitMix64 rng = keyed_stream(seed, static_cast<std::uint64_t>(i), 0);
    const int true_class = static_cast<int>(rng.next() % static_cast<std::uint64_t>(num_classes));
    const bool flip = rng.uniform01() <= mislabel_fraction;
    int label = true_class;
    if (flip) {
      const int shift =
          1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(num_classes - 1));
      label = (true_class + shift) % num_classes;
    }
    PredictionRecord rec;
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth-%07lld", static_cast<long long>(i));
    rec.id = buf;
    rec.label = label;
    rec.probs = Eigen::ArrayXd::Constant(num_classes, off);
    rec.probs[true_class] = confidence;
    corpus.records.push_back(std::move(rec));
    corpus.mislabeled.push_back(flip ? 1 : 0);
  }
  return corpus;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail(errc::bad_input, context + ": trailing characters in '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(errc::bad_input, context + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

std::vector<PredictionRecord> read_prediction_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(errc::empty_input, "prediction csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "label") {
    fail(errc::bad_input, "prediction csv must start with id,label,p0,...");
  }
  int k = 0;
  std::size_t col = 2;
  while (col < header.size() && header[col] == "p" + std::to_string(k)) {
    ++k;
    ++col;
  }
  if (k < 2) fail(errc::bad_input, "prediction csv needs columns p0 and p1 at least");
  bool has_baseline = false;
  if (col < header.size()) {
    for (int j = 0; j < k; ++j, ++col) {
      if (col >= header.size() || header[col] != "baseline" + std::to_string(j)) {
        fail(errc::bad_input, "prediction csv baseline columns must be baseline0..baseline" +
                                  std::to_string(k - 1));
      }
    }
    has_baseline = true;
  }
  if (col != header.size()) fail(errc::bad_input, "prediction csv has unexpected trailing columns");

  std::vector<PredictionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    const std::size_t expected = 2 + static_cast<std::size_t>(has_baseline ? 2 * k : k);
    const std::string context = "line " + std::to_string(line_no);
    if (cells.size() != expected) {
      fail(errc::bad_input, context + ": expected " + std::to_string(expected) + " cells, got " +
                                std::to_string(cells.size()));
    }
    PredictionRecord rec;
    rec.id = cells[0];
    if (rec.id.empty()) fail(errc::bad_input, context + ": empty id");
    rec.label = static_cast<int>(parse_double(cells[1], context + " label"));
    rec.probs = Eigen::ArrayXd(k);
    for (int j = 0; j < k; ++j) {
      rec.probs[j] = parse_double(cells[2 + static_cast<std::size_t>(j)], context);
    }
    if (has_baseline) {
      Eigen::ArrayXd b(k);
      for (int j = 0; j < k; ++j) {
        b[j] = parse_double(cells[2 + static_cast<std::size_t>(k + j)], context);
      }
      rec.baseline = std::move(b);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) fail(errc::empty_input, "prediction csv has a header but no records");
  return records;
}

void write_prediction_csv(std::ostream& out, const std::vector<PredictionRecord>& records) {
  if (records.empty()) fail(errc::empty_input, "no records to write");
  const Eigen::Index k = records.front().probs.size();
  const bool has_baseline = records.front().baseline.has_value();
  out << "id,label";
  for (Eigen::Index j = 0; j < k; ++j) out << ",p" << j;
  if (has_baseline) {
    for (Eigen::Index j = 0; j < k; ++j) out << ",baseline" << j;
  }
  out << "\n";
  for (const auto& rec : records) {
    out << rec.id << "," << rec.label;
    for (Eigen::Index j = 0; j < k; ++j) out << "," << format17(rec.probs[j]);
    if (has_baseline) {
      for (Eigen::Index j = 0; j < k; ++j) out << "," << format17((*rec.baseline)[j]);
    }
    out << "\n";
  }
}

void write_record_info_csv(std::ostream& out, const std::vector<LabelRecordInfo>& records) {
  out << "id,label,predictive_bits,residual_bits,total_bits,negative_flag\n";
  for (const auto& r : records) {
    out << r.id << "," << r.label << "," << format17(r.predictive_bits) << ","
        << format17(r.residual_bits) << "," << format17(r.total_bits) << ","
        << (r.negative ? 1 : 0) << "\n";
  }
}

void write_truth_csv(std::ostream& out, const SyntheticCorpus& corpus) {
  out << "id,mislabeled\n";
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    out << corpus.records[i].id << "," << static_cast<int>(corpus.mislabeled[i]) << "\n";
  }
}

}  // namespace beliefinfo
