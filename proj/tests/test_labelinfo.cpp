#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "beliefinfo/errors.hpp"
#include "beliefinfo/labelinfo.hpp"
#include "beliefinfo/measures.hpp"
#include "beliefinfo/rng.hpp"
#include "test_support.hpp"

using namespace beliefinfo;
using testsupport::close;

namespace {

constexpr double kLog2Of10 = 3.3219280948873623;
constexpr double kLog2Of9 = 3.1699250014423124;

Eigen::ArrayXd arr(std::initializer_list<double> values) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) a[i++] = v;
  return a;
}

// k classes with `mass` on `hot` and the remainder spread evenly.
Eigen::ArrayXd peaked(Eigen::Index k, Eigen::Index hot, double mass) {
  Eigen::ArrayXd p = Eigen::ArrayXd::Constant(k, (1.0 - mass) / static_cast<double>(k - 1));
  p[hot] = mass;
  return p;
}

PredictionRecord record(std::string id, int label, Eigen::ArrayXd probs) {
  PredictionRecord r;
  r.id = std::move(id);
  r.label = label;
  r.probs = std::move(probs);
  return r;
}

// Ten classes, exact zero on class 9, the rest of the mass on classes 0..8.
Eigen::ArrayXd zero_on_nine() {
  Eigen::ArrayXd p = Eigen::ArrayXd::Constant(10, 0.45 / 8.0);
  p[0] = 0.55;
  p[9] = 0.0;
  return p;
}

template <typename Fn>
std::optional<errc> thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("predictive_label_info: closed forms against a uniform baseline") {
  const Categorical uniform10 = Categorical::uniform(10);

  // Prediction equal to the baseline says nothing about any label.
  for (int y = 0; y < 10; ++y) {
    CHECK(predictive_label_info(uniform10, uniform10, y).nats == 0.0);
  }

  // Certainty on the labeled class resolves all ten-way uncertainty.
  Eigen::ArrayXd sure = Eigen::ArrayXd::Zero(10);
  sure[4] = 1.0;
  CHECK(close(predictive_label_info(Categorical(sure), uniform10, 4).bits(), kLog2Of10, 1e-12));

  // Half the uninformed probability on the label costs exactly one bit.
  CHECK(close(predictive_label_info(Categorical(peaked(10, 3, 0.05)), uniform10, 3).bits(), -1.0,
              1e-12));

  // A vanished labeled class diverges negatively; the residual picks up the
  // matching positive divergence.
  CHECK(predictive_label_info(Categorical(sure), uniform10, 7).negative_infinite());
  CHECK(residual_label_info(Categorical(sure), 7).positive_infinite());

  CHECK(thrown_code([&] {
          predictive_label_info(uniform10, Categorical::uniform(9), 0);
        }) == errc::inconsistent_class_count);
  CHECK(thrown_code([&] { predictive_label_info(uniform10, uniform10, 10); }) ==
        errc::index_out_of_range);
  CHECK(thrown_code([&] { residual_label_info(uniform10, -1); }) == errc::index_out_of_range);
}

TEST_CASE("residual_label_info: leftover surprisal of the labeled class") {
  Eigen::ArrayXd sure = Eigen::ArrayXd::Zero(3);
  sure[1] = 1.0;
  CHECK(residual_label_info(Categorical(sure), 1).nats == 0.0);

  CHECK(close(residual_label_info(Categorical::uniform(10), 6).bits(), kLog2Of10, 1e-12));
  CHECK(close(residual_label_info(Categorical(arr({0.25, 0.5, 0.25})), 0).bits(), 2.0, 1e-14));
}

TEST_CASE("generative_predictive_info: expected per-label information under the model") {
  const Categorical q = Categorical(arr({0.5, 0.3, 0.2}));
  CHECK(generative_predictive_info(q, BeliefWeights(q)).nats == 0.0);

  Eigen::ArrayXd sure = Eigen::ArrayXd::Zero(10);
  sure[2] = 1.0;
  CHECK(close(
      generative_predictive_info(Categorical(sure), BeliefWeights(Categorical::uniform(10)))
          .bits(),
      kLog2Of10, 1e-12));

  // Three-term evaluation: 0.5 log2(1.5) + 0.3 log2(0.9) + 0.2 log2(0.6).
  CHECK(close(generative_predictive_info(q, BeliefWeights(Categorical::uniform(3))).bits(),
              0.099487203493821862, 1e-13));
}

TEST_CASE("analyze: per-record conservation and sign semantics") {
  SplitMix64 rng(0xab5eedULL);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 300; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "r%03d", i);
    PredictionRecord rec = record(id, static_cast<int>(rng.next() % 7),
                                  testsupport::random_categorical(rng, 7).probs());
    if (i % 2 == 0) rec.baseline = testsupport::random_categorical(rng, 7).probs();
    records.push_back(std::move(rec));
  }

  const LabelInfoReport report = analyze(records);
  REQUIRE(report.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LabelRecordInfo& r = report.records[i];
    CHECK(r.id == records[i].id);
    CHECK(r.label == records[i].label);
    // predictive + residual = total, and total is pinned by the baseline.
    CHECK(close(r.predictive_bits + r.residual_bits, r.total_bits, 1e-9));
    const Categorical baseline = records[i].baseline
                                     ? Categorical::normalized(*records[i].baseline)
                                     : Categorical::uniform(7);
    CHECK(close(r.total_bits, -std::log2(baseline[r.label]), 1e-12));
    // Negative predictive information means the labeled class lost ground.
    const Categorical probs = Categorical::normalized(records[i].probs);
    CHECK(r.negative == (probs[r.label] < baseline[r.label]));
    CHECK(r.negative == (r.predictive_bits < 0.0));
  }
  CHECK(report.summary.count == 300);
  CHECK(report.summary.infinite_records == 0);
}

TEST_CASE("analyze: raising the labeled probability raises its information") {
  // Proper response to perturbation: mass moved onto the labeled class,
  // with the rest rescaled proportionally, always helps.
  const Eigen::ArrayXd base = arr({0.1, 0.3, 0.4, 0.2});
  const int label = 1;
  double previous = -1e300;
  for (double bump = 0.0; bump < 0.6; bump += 0.05) {
    const double target = base[label] + bump;
    Eigen::ArrayXd p = base * ((1.0 - target) / (1.0 - base[label]));
    p[label] = target;
    const double value =
        predictive_label_info(Categorical(p), Categorical::uniform(4), label).bits();
    CHECK(value > previous);
    previous = value;
  }
}

TEST_CASE("analyze: ranking, mean, and divergent records") {
  std::vector<PredictionRecord> records;
  // -1 bit, 0 bits, +1 bit, and a -inf record; ids chosen so ties cannot hide
  // an unstable sort.
  records.push_back(record("b-neg", 2, peaked(10, 5, 0.55)));  // p[2] = 0.05 -> -1 bit
  records.push_back(record("a-zero", 3, Categorical::uniform(10).probs()));
  records.push_back(record("c-pos", 4, peaked(10, 4, 0.2)));  // p[4] = 0.2 -> +1 bit
  records.push_back(record("d-dead", 9, zero_on_nine()));  // label 9 vanishes

  const LabelInfoReport report = analyze(records);
  REQUIRE(report.records.size() == 4);
  CHECK(close(report.records[0].predictive_bits, -1.0, 1e-9));
  CHECK(report.records[1].predictive_bits == 0.0);
  CHECK(close(report.records[2].predictive_bits, 1.0, 1e-9));
  CHECK(report.records[3].predictive_bits == -std::numeric_limits<double>::infinity());

  // Divergent records rank first and stay out of the mean.
  const std::vector<std::string> expected = {"d-dead", "b-neg", "a-zero", "c-pos"};
  CHECK(report.ranking == expected);
  CHECK(report.summary.count == 4);
  CHECK(report.summary.infinite_records == 1);
  CHECK(close(report.summary.mean_predictive_bits,
              (report.records[0].predictive_bits + 0.0 + report.records[2].predictive_bits) / 3.0,
              1e-12));
  CHECK(report.summary.fraction_negative == 0.5);  // b-neg and d-dead

  // Equal predictive values fall back to id order.
  std::vector<PredictionRecord> ties;
  ties.push_back(record("zz", 0, Categorical::uniform(4).probs()));
  ties.push_back(record("aa", 1, Categorical::uniform(4).probs()));
  ties.push_back(record("mm", 2, Categorical::uniform(4).probs()));
  const LabelInfoReport tied = analyze(ties);
  const std::vector<std::string> alphabetical = {"aa", "mm", "zz"};
  CHECK(tied.ranking == alphabetical);
}

TEST_CASE("analyze: histogram binning and edge clamping") {
  std::vector<PredictionRecord> records;
  records.push_back(record("interior", 2, peaked(10, 2, 0.2)));  // +1 bit
  records.push_back(record("neg-inf", 9, zero_on_nine()));  // below lo -> first bin
  records.push_back(record("zero", 1, Categorical::uniform(10).probs()));  // 0 bits

  const LabelInfoReport report = analyze(records, 40);  // width 1 bit over [-20, 20)
  REQUIRE(report.summary.histogram.size() == 40);
  std::int64_t total = 0;
  for (std::int64_t c : report.summary.histogram) total += c;
  CHECK(total == report.summary.count);
  CHECK(report.summary.histogram[0] == 1);   // -inf clamps to the low edge
  CHECK(report.summary.histogram[20] == 1);  // 0 bits
  CHECK(report.summary.histogram[21] == 1);  // +1 bit
}

TEST_CASE("analyze: permutation invariance of summaries and ranking") {
  SplitMix64 rng(0x0fabcdefULL);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 128; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "perm%04d", i);
    records.push_back(record(id, static_cast<int>(rng.next() % 5),
                             testsupport::random_categorical(rng, 5).probs()));
  }
  const LabelInfoReport before = analyze(records);

  std::vector<PredictionRecord> shuffled = records;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.next() % i]);
  }
  const LabelInfoReport after = analyze(shuffled);

  CHECK(after.ranking == before.ranking);
  CHECK(after.summary.count == before.summary.count);
  CHECK(after.summary.infinite_records == before.summary.infinite_records);
  CHECK(after.summary.fraction_negative == before.summary.fraction_negative);
  CHECK(after.summary.histogram == before.summary.histogram);
  CHECK(close(after.summary.mean_predictive_bits, before.summary.mean_predictive_bits, 1e-12));
}

TEST_CASE("analyze: rejection paths") {
  CHECK(thrown_code([] { analyze({}); }) == errc::empty_input);
  CHECK(thrown_code([] {
          analyze({record("x", 0, Categorical::uniform(3).probs())}, 0);
        }) == errc::bad_input);
  CHECK(thrown_code([] { analyze({record("x", 0, arr({1.0}))}); }) == errc::bad_input);
  CHECK(thrown_code([] {
          analyze({record("x", 0, Categorical::uniform(3).probs()),
                   record("y", 0, Categorical::uniform(4).probs())});
        }) == errc::inconsistent_class_count);
  CHECK(thrown_code([] {
          PredictionRecord r = record("x", 0, Categorical::uniform(3).probs());
          r.baseline = Categorical::uniform(4).probs();
          analyze({r});
        }) == errc::inconsistent_class_count);
  CHECK(thrown_code([] { analyze({record("x", 3, Categorical::uniform(3).probs())}); }) ==
        errc::index_out_of_range);
  CHECK(thrown_code([] { analyze({record("x", 0, arr({0.5, 0.3}))}); }) == errc::not_normalized);
  CHECK(thrown_code([] { analyze({record("x", 0, arr({1.2, -0.2}))}); }) == errc::bad_input);

  // Float noise within 1e-6 of a proper distribution is renormalized, and the
  // conservation identity holds for the renormalized probabilities.
  const double wobble = 1.0 + 5e-7;
  const LabelInfoReport report =
      analyze({record("x", 1, arr({0.25 * wobble, 0.5 * wobble, 0.25 * wobble}))});
  CHECK(close(report.records[0].predictive_bits, std::log2(0.5 * 3.0), 1e-9));
  CHECK(close(report.records[0].predictive_bits + report.records[0].residual_bits,
              report.records[0].total_bits, 1e-9));
}

TEST_CASE("generate_synthetic: determinism and closed-form information") {
  const SyntheticCorpus a = generate_synthetic(200, 10, 0.9, 0.3, 77);
  const SyntheticCorpus b = generate_synthetic(200, 10, 0.9, 0.3, 77);
  REQUIRE(a.records.size() == 200);
  REQUIRE(a.mislabeled.size() == 200);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].label == b.records[i].label);
    CHECK((a.records[i].probs == b.records[i].probs).all());
  }

  const SyntheticCorpus c = generate_synthetic(200, 10, 0.9, 0.3, 78);
  bool any_difference = false;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    any_difference = any_difference || c.records[i].label != a.records[i].label ||
                     !(c.records[i].probs == a.records[i].probs).all();
  }
  CHECK(any_difference);

  // The flag is recoverable from the record alone: a mislabeled record's
  // label misses the confident class.
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    Eigen::Index hot = 0;
    a.records[i].probs.maxCoeff(&hot);
    CHECK((a.mislabeled[i] != 0) == (static_cast<int>(hot) != a.records[i].label));
  }

  // Every genuine label carries log2(k * confidence) bits and every wrong
  // label log2(k * (1 - confidence)/(k-1)) bits, here +log2(9) and -log2(9).
  const LabelInfoReport report = analyze(a.records);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const double expected = a.mislabeled[i] ? -kLog2Of9 : kLog2Of9;
    CHECK(close(report.records[i].predictive_bits, expected, 1e-12));
    CHECK(report.records[i].negative == (a.mislabeled[i] != 0));
  }
}

TEST_CASE("generate_synthetic: mislabel-fraction extremes and parameter range") {
  const SyntheticCorpus clean = generate_synthetic(400, 10, 0.9, 0.0, 5);
  const LabelInfoReport clean_report = analyze(clean.records);
  CHECK(clean_report.summary.fraction_negative == 0.0);
  CHECK(close(clean_report.summary.mean_predictive_bits, kLog2Of9, 1e-9));
  for (std::uint8_t flag : clean.mislabeled) CHECK(flag == 0);

  const SyntheticCorpus dirty = generate_synthetic(400, 10, 0.9, 1.0, 5);
  const LabelInfoReport dirty_report = analyze(dirty.records);
  CHECK(dirty_report.summary.fraction_negative == 1.0);
  CHECK(close(dirty_report.summary.mean_predictive_bits, -kLog2Of9, 1e-9));
  for (std::uint8_t flag : dirty.mislabeled) CHECK(flag == 1);

  // Half-and-half at scale: every mislabeled record is negative by
  // construction (confidence > 1/k), and the split hovers near one half.
  const SyntheticCorpus half = generate_synthetic(10000, 10, 0.9, 0.5, 99);
  const LabelInfoReport half_report = analyze(half.records);
  std::int64_t flagged = 0;
  for (std::size_t i = 0; i < half.records.size(); ++i) {
    if (half.mislabeled[i]) {
      ++flagged;
      CHECK(half_report.records[i].negative);
    } else {
      CHECK(!half_report.records[i].negative);
    }
  }
  CHECK(std::abs(static_cast<double>(flagged) / 10000.0 - 0.5) < 0.02);
  CHECK(half_report.summary.fraction_negative ==
        static_cast<double>(flagged) / 10000.0);

  // Barely informative predictions sit barely above zero information.
  const SyntheticCorpus faint = generate_synthetic(50, 10, 0.1 + 1e-9, 0.0, 1);
  const LabelInfoReport faint_report = analyze(faint.records);
  for (const auto& r : faint_report.records) CHECK(close(r.predictive_bits, 0.0, 1e-7));

  CHECK(thrown_code([] { generate_synthetic(0, 10, 0.9, 0.5, 1); }) == errc::bad_input);
  CHECK(thrown_code([] { generate_synthetic(10, 1, 0.9, 0.5, 1); }) == errc::bad_input);
  CHECK(thrown_code([] { generate_synthetic(10, 10, 0.1, 0.5, 1); }) == errc::bad_input);
  CHECK(thrown_code([] { generate_synthetic(10, 10, 1.0, 0.5, 1); }) == errc::bad_input);
  CHECK(thrown_code([] { generate_synthetic(10, 10, 0.9, -0.1, 1); }) == errc::bad_input);
  CHECK(thrown_code([] { generate_synthetic(10, 10, 0.9, 1.1, 1); }) == errc::bad_input);
}

TEST_CASE("prediction csv: round trip preserves every field exactly") {
  SplitMix64 rng(0xc5beefULL);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 40; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "csv%03d", i);
    PredictionRecord rec = record(id, static_cast<int>(rng.next() % 6),
                                  testsupport::random_categorical(rng, 6).probs());
    rec.baseline = testsupport::random_categorical(rng, 6).probs();
    records.push_back(std::move(rec));
  }

  std::stringstream buffer;
  write_prediction_csv(buffer, records);
  const std::vector<PredictionRecord> reread = read_prediction_csv(buffer);
  REQUIRE(reread.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reread[i].id == records[i].id);
    CHECK(reread[i].label == records[i].label);
    CHECK((reread[i].probs == records[i].probs).all());
    REQUIRE(reread[i].baseline.has_value());
    CHECK((*reread[i].baseline == *records[i].baseline).all());
  }

  // Without baselines the columns disappear and the reread records have none.
  std::vector<PredictionRecord> bare = records;
  for (auto& r : bare) r.baseline.reset();
  std::stringstream bare_buffer;
  write_prediction_csv(bare_buffer, bare);
  CHECK(bare_buffer.str().rfind("id,label,p0,p1,p2,p3,p4,p5\n", 0) == 0);
  const std::vector<PredictionRecord> bare_reread = read_prediction_csv(bare_buffer);
  CHECK(!bare_reread.front().baseline.has_value());
}

TEST_CASE("prediction csv: tolerated and rejected inputs") {
  // CRLF endings and blank lines are routine in exported logs.
  std::stringstream crlf("id,label,p0,p1\r\nr1,0,0.75,0.25\r\n\r\nr2,1,0.5,0.5\r\n");
  const std::vector<PredictionRecord> tolerant = read_prediction_csv(crlf);
  REQUIRE(tolerant.size() == 2);
  CHECK(tolerant[0].probs[0] == 0.75);
  CHECK(tolerant[1].id == "r2");

  const auto reject = [](const std::string& text) {
    std::stringstream in(text);
    return thrown_code([&] { read_prediction_csv(in); });
  };
  CHECK(reject("") == errc::empty_input);
  CHECK(reject("id,label,p0,p1\n") == errc::empty_input);
  CHECK(reject("label,id,p0,p1\nr,0,0.5,0.5\n") == errc::bad_input);
  CHECK(reject("id,label,p0\nr,0,1.0\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1,baseline0\nr,0,0.5,0.5,1.0\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1,extra\nr,0,0.5,0.5,1.0\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1\nr,0,0.5\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1\nr,0,0.5,0.5,0.5\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1\n,0,0.5,0.5\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1\nr,0,0.5x,0.5\n") == errc::bad_input);
  CHECK(reject("id,label,p0,p1\nr,0,half,0.5\n") == errc::bad_input);

  // The reader parses; normalization problems surface at analysis time.
  std::stringstream off("id,label,p0,p1\nr,0,0.5,0.3\n");
  const std::vector<PredictionRecord> unnormalized = read_prediction_csv(off);
  CHECK(thrown_code([&] { analyze(unnormalized); }) == errc::not_normalized);
}

TEST_CASE("report csv writers: stable headers and flag encoding") {
  std::vector<PredictionRecord> records;
  records.push_back(record("good", 2, peaked(10, 2, 0.9)));
  records.push_back(record("bad", 2, peaked(10, 5, 0.9)));
  const LabelInfoReport report = analyze(records);

  std::stringstream info_csv;
  write_record_info_csv(info_csv, report.records);
  std::string line;
  std::getline(info_csv, line);
  CHECK(line == "id,label,predictive_bits,residual_bits,total_bits,negative_flag");
  std::getline(info_csv, line);
  CHECK(line.rfind("good,2,", 0) == 0);
  CHECK(line.back() == '0');
  std::getline(info_csv, line);
  CHECK(line.rfind("bad,2,", 0) == 0);
  CHECK(line.back() == '1');

  const SyntheticCorpus corpus = generate_synthetic(3, 4, 0.7, 1.0, 11);
  std::stringstream truth_csv;
  write_truth_csv(truth_csv, corpus);
  std::getline(truth_csv, line);
  CHECK(line == "id,mislabeled");
  std::getline(truth_csv, line);
  CHECK(line == "synth-0000000,1");
}
