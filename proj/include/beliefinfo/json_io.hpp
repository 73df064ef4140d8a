#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "beliefinfo/categorical.hpp"
#include "beliefinfo/critical.hpp"
#include "beliefinfo/errors.hpp"
#include "beliefinfo/experiments.hpp"
#include "beliefinfo/gaussian.hpp"
#include "beliefinfo/info_value.hpp"
#include "beliefinfo/labelinfo.hpp"

// Wire formats shared by the CLI and the test harness. All parse errors are
// reported as errc::bad_input so the caller can map them to one exit code.
// Serialization is deterministic: nlohmann orders object keys, doubles print
// shortest-round-trip in JSON and %.17g in CSV.

namespace beliefinfo::io {

using json = nlohmann::json;

// --- parsing ---------------------------------------------------------------

// Wraps nlohmann parse exceptions into Error(bad_input).
json parse_json(const std::string& text, const std::string& what);
json load_json_file(const std::string& path);

Eigen::ArrayXd parse_array(const json& j, const std::string& what);
Eigen::MatrixXd parse_dense_matrix(const json& j, const std::string& what);

// Bare array or {"probs": [...]}.
Categorical parse_categorical(const json& j, const std::string& what);
// Bare array or {"weights": [...]} or {"probs": [...]}.
BeliefWeights parse_weights(const json& j, const std::string& what);
// Bare row-major nested array or {"probs": [[...]]}.
JointCategorical parse_joint(const json& j, const std::string& what);
// {"mean": [...], "cov": [[...]]}.
Gaussian parse_gaussian(const json& j, const std::string& what);
// {"kernel": [...], "target": x}.
ExpectationConstraint parse_constraint(const json& j, const std::string& what);
// Bare array of constraints or {"constraints": [...]}.
std::vector<ExpectationConstraint> parse_constraints(const json& j, const std::string& what);
// Object with optional keys dim, prior, noise_sigma, batch_sizes,
// num_experiments, master_seed, scenario, histogram; unknown keys rejected.
ExperimentConfig parse_experiment_config(const json& j);

// --- serialization ---------------------------------------------------------

const char* unit_name(Unit unit);          // "bits" / "nats"
const char* unit_squared_name(Unit unit);  // "bits^2" / "nats^2"
const char* scenario_name(Scenario scenario);
Scenario parse_scenario(const std::string& name);

// {"value": x, "units": u}; infinities appear as the strings "+inf"/"-inf".
json value_envelope(const InfoValue& value, Unit unit);
// Same envelope for plain (already converted) scalars with a custom unit tag,
// e.g. variances in bits^2.
json scalar_envelope(double value, const std::string& units);
json error_envelope(const Error& error);

json solver_report(const CriticalSolution& solution);
json ensemble_summary_json(const EnsembleSummary& summary, Unit unit);
json label_report_json(const LabelInfoReport& report);

// stage,bin_lo,bin_hi,count with view stages 1..K and the realization limit
// as stage K+1; edges converted to `unit`.
void write_histograms_csv(std::ostream& out, const EnsembleSummary& summary, Unit unit);
// id,theta*,stage*,realization with values converted to `unit`.
void write_records_csv(std::ostream& out, const std::vector<RecordRow>& rows, Unit unit);

// %.17g, enough digits to round-trip a double.
std::string format_double(double value);

}  // namespace beliefinfo::io
