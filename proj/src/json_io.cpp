#include "beliefinfo/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

namespace beliefinfo::io {

namespace {

[[noreturn]] void bad(const std::string& what, const std::string& detail) {
  fail(errc::bad_input, what + ": " + detail);
}

const json& require_field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object()) bad(what, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(what, std::string("missing field '") + key + "'");
  return *it;
}

double as_double(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what, "expected an integer");
  return j.get<std::int64_t>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& what) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) bad(what, "unknown field '" + item.key() + "'");
  }
}

json info_field(double nats, Unit unit) {
  const double v = nats_to(nats, unit);
  if (std::isinf(v)) return v > 0 ? json("+inf") : json("-inf");
  return json(v);
}

json stage_summary_json(const StageSummary& stage, Unit unit) {
  const std::string u = unit_name(unit);
  json j;
  j["mean_" + u] = info_field(stage.mean, unit);
  j["variance_" + u + "2"] = nats_to(nats_to(stage.variance, unit), unit);
  j["fraction_negative"] = stage.fraction_negative;
  j["min_" + u] = info_field(stage.min, unit);
  j["argmin_id"] = stage.argmin_id;
  j["max_" + u] = info_field(stage.max, unit);
  j["argmax_id"] = stage.argmax_id;
  return j;
}

void write_stage_histogram(std::ostream& out, const StageSummary& stage,
                           const HistogramSpec& spec, int stage_index, Unit unit) {
  const double width_bits = (spec.hi_bits - spec.lo_bits) / spec.bins;
  const double to_unit = unit == Unit::bits ? 1.0 : std::numbers::ln2;
  for (int b = 0; b < spec.bins; ++b) {
    const double lo = (spec.lo_bits + b * width_bits) * to_unit;
    const double hi = (spec.lo_bits + (b + 1) * width_bits) * to_unit;
    out << stage_index << ',' << format_double(lo) << ',' << format_double(hi) << ','
        << stage.histogram[static_cast<std::size_t>(b)] << '\n';
  }
}

}  // namespace

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad(what, "malformed JSON");
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_input, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path);
}

Eigen::ArrayXd parse_array(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what, "expected an array of numbers");
  Eigen::ArrayXd out(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& item : j) out[i++] = as_double(item, what);
  return out;
}

Eigen::MatrixXd parse_dense_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::ArrayXd row = parse_array(j[static_cast<std::size_t>(r)], what);
    if (cols < 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      bad(what, "rows have unequal lengths");
    }
    out.row(r) = row.matrix().transpose();
  }
  return out;
}

Categorical parse_categorical(const json& j, const std::string& what) {
  const json& probs = j.is_object() ? require_field(j, "probs", what) : j;
  return Categorical(parse_array(probs, what));
}

BeliefWeights parse_weights(const json& j, const std::string& what) {
  const json* payload = &j;
  if (j.is_object()) {
    if (auto it = j.find("weights"); it != j.end()) {
      payload = &*it;
    } else {
      payload = &require_field(j, "probs", what);
    }
  }
  return BeliefWeights(parse_array(*payload, what));
}

JointCategorical parse_joint(const json& j, const std::string& what) {
  const json& probs = j.is_object() ? require_field(j, "probs", what) : j;
  return JointCategorical(parse_dense_matrix(probs, what));
}

Gaussian parse_gaussian(const json& j, const std::string& what) {
  const Eigen::ArrayXd mean = parse_array(require_field(j, "mean", what), what + ".mean");
  const Eigen::MatrixXd cov = parse_dense_matrix(require_field(j, "cov", what), what + ".cov");
  return Gaussian(mean.matrix(), cov);
}

ExpectationConstraint parse_constraint(const json& j, const std::string& what) {
  ExpectationConstraint c;
  c.kernel = parse_array(require_field(j, "kernel", what), what + ".kernel").matrix();
  c.target = as_double(require_field(j, "target", what), what + ".target");
  return c;
}

std::vector<ExpectationConstraint> parse_constraints(const json& j, const std::string& what) {
  const json& list = j.is_object() ? require_field(j, "constraints", what) : j;
  if (!list.is_array()) bad(what, "expected an array of constraints");
  std::vector<ExpectationConstraint> out;
  out.reserve(list.size());
  for (const auto& item : list) out.push_back(parse_constraint(item, what));
  return out;
}

ExperimentConfig parse_experiment_config(const json& j) {
  const std::string what = "experiment config";
  if (!j.is_object()) bad(what, "expected an object");
  reject_unknown_keys(j,
                      {"dim", "prior", "noise_sigma", "batch_sizes", "num_experiments",
                       "master_seed", "scenario", "histogram"},
                      what);
  ExperimentConfig config;
  if (auto it = j.find("dim"); it != j.end()) {
    config.dim = static_cast<int>(as_int(*it, what + ".dim"));
  }
  if (auto it = j.find("prior"); it != j.end()) {
    config.prior = parse_gaussian(*it, what + ".prior");
  }
  if (auto it = j.find("noise_sigma"); it != j.end()) {
    config.noise_sigma = as_double(*it, what + ".noise_sigma");
  }
  if (auto it = j.find("batch_sizes"); it != j.end()) {
    if (!it->is_array() || it->empty()) bad(what, "batch_sizes must be a nonempty array");
    config.batch_sizes.clear();
    for (const auto& item : *it) {
      config.batch_sizes.push_back(static_cast<int>(as_int(item, what + ".batch_sizes")));
    }
  }
  if (auto it = j.find("num_experiments"); it != j.end()) {
    config.num_experiments = as_int(*it, what + ".num_experiments");
  }
  if (auto it = j.find("master_seed"); it != j.end()) {
    if (!it->is_number_integer() && !it->is_number_unsigned()) {
      bad(what, "master_seed must be an integer");
    }
    config.master_seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("scenario"); it != j.end()) {
    if (!it->is_string()) bad(what, "scenario must be a string");
    config.scenario = parse_scenario(it->get<std::string>());
  }
  if (auto it = j.find("histogram"); it != j.end()) {
    reject_unknown_keys(*it, {"lo_bits", "hi_bits", "bins"}, what + ".histogram");
    if (auto f = it->find("lo_bits"); f != it->end()) {
      config.histogram.lo_bits = as_double(*f, what + ".histogram.lo_bits");
    }
    if (auto f = it->find("hi_bits"); f != it->end()) {
      config.histogram.hi_bits = as_double(*f, what + ".histogram.hi_bits");
    }
    if (auto f = it->find("bins"); f != it->end()) {
      config.histogram.bins = static_cast<int>(as_int(*f, what + ".histogram.bins"));
    }
  }
  return config;
}

const char* unit_name(Unit unit) { return unit == Unit::bits ? "bits" : "nats"; }

const char* unit_squared_name(Unit unit) { return unit == Unit::bits ? "bits^2" : "nats^2"; }

const char* scenario_name(Scenario scenario) {
  return scenario == Scenario::genuine ? "genuine" : "inconsistent";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "genuine") return Scenario::genuine;
  if (name == "inconsistent") return Scenario::inconsistent;
  fail(errc::bad_input, "unknown scenario '" + name + "'");
}

json value_envelope(const InfoValue& value, Unit unit) {
  json j;
  if (value.positive_infinite()) {
    j["value"] = "+inf";
  } else if (value.negative_infinite()) {
    j["value"] = "-inf";
  } else {
    j["value"] = value.in(unit);
  }
  j["units"] = unit_name(unit);
  return j;
}

json scalar_envelope(double value, const std::string& units) {
  json j;
  if (std::isinf(value)) {
    j["value"] = value > 0 ? "+inf" : "-inf";
  } else {
    j["value"] = value;
  }
  j["units"] = units;
  return j;
}

json error_envelope(const Error& error) {
  return json{{"error", {{"code", errc_name(error.code())}, {"message", error.what()}}}};
}

json solver_report(const CriticalSolution& solution) {
  json j;
  j["probs"] = std::vector<double>(solution.distribution.probs().begin(),
                                   solution.distribution.probs().end());
  j["lambda"] = std::vector<double>(solution.lambda.begin(), solution.lambda.end());
  j["residual"] = solution.residual;
  j["iterations"] = solution.iterations;
  return j;
}

json ensemble_summary_json(const EnsembleSummary& summary, Unit unit) {
  const std::string u = unit_name(unit);
  json j;
  j["num_experiments"] = summary.num_experiments;
  j["master_seed"] = summary.master_seed;
  j["scenario"] = scenario_name(summary.scenario);
  j["mutual_info_" + u] = nats_to(summary.mutual_info, unit);
  j["covariance_floor_" + u] = nats_to(summary.covariance_floor, unit);
  json stages = json::array();
  for (std::size_t k = 0; k < summary.stages.size(); ++k) {
    json stage = stage_summary_json(summary.stages[k], unit);
    stage["stage"] = k + 1;
    stages.push_back(std::move(stage));
  }
  j["stages"] = std::move(stages);
  json realization = stage_summary_json(summary.realization, unit);
  realization["laplace"] = {
      {"location_" + u, nats_to(summary.realization_laplace.location, unit)},
      {"scale_" + u, nats_to(summary.realization_laplace.scale, unit)},
  };
  j["realization"] = std::move(realization);
  return j;
}

json label_report_json(const LabelInfoReport& report) {
  json j;
  j["count"] = report.summary.count;
  j["infinite_records"] = report.summary.infinite_records;
  j["mean_predictive_bits"] = report.summary.mean_predictive_bits;
  j["fraction_negative"] = report.summary.fraction_negative;
  j["histogram"] = {
      {"lo_bits", report.summary.histogram_lo_bits},
      {"hi_bits", report.summary.histogram_hi_bits},
      {"counts", report.summary.histogram},
  };
  j["ranking"] = report.ranking;
  return j;
}

void write_histograms_csv(std::ostream& out, const EnsembleSummary& summary, Unit unit) {
  out << "stage,bin_lo,bin_hi,count\n";
  int stage_index = 1;
  for (const auto& stage : summary.stages) {
    write_stage_histogram(out, stage, summary.histogram, stage_index++, unit);
  }
  write_stage_histogram(out, summary.realization, summary.histogram, stage_index, unit);
}

void write_records_csv(std::ostream& out, const std::vector<RecordRow>& rows, Unit unit) {
  if (rows.empty()) fail(errc::empty_input, "no record rows to write");
  const std::string u = unit_name(unit);
  out << "id";
  for (Eigen::Index d = 0; d < rows.front().true_theta.size(); ++d) out << ",theta" << d;
  for (std::size_t k = 0; k < rows.front().stage_info.size(); ++k) {
    out << ",stage" << (k + 1) << '_' << u;
  }
  out << ",realization_" << u << '\n';
  for (const auto& row : rows) {
    out << row.id;
    for (Eigen::Index d = 0; d < row.true_theta.size(); ++d) {
      out << ',' << format_double(row.true_theta[d]);
    }
    for (const double nats : row.stage_info) out << ',' << format_double(nats_to(nats, unit));
    out << ',' << format_double(nats_to(row.realization_info, unit)) << '\n';
  }
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace beliefinfo::io
