#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "beliefinfo/fisher.hpp"
#include "beliefinfo/json_io.hpp"
#include "beliefinfo/measures.hpp"

// Single binary, one subcommand per module. Machine-readable JSON/CSV goes to
// stdout, human logs to stderr. Exit codes: 0 ok, 2 input error, 3 domain
// error, 4 infeasible, 5 no convergence.

namespace {

namespace bi = beliefinfo;
namespace io = beliefinfo::io;
using io::json;

int exit_code_for(bi::errc code) {
  switch (code) {
    case bi::errc::infeasible:
      return 4;
    case bi::errc::no_convergence:
      return 5;
    case bi::errc::bad_input:
    case bi::errc::empty_input:
    case bi::errc::not_normalized:
    case bi::errc::inconsistent_class_count:
    case bi::errc::support_mismatch:
    case bi::errc::dimension_mismatch:
    case bi::errc::index_out_of_range:
    case bi::errc::invalid_order:
      return 2;
    default:
      return 3;
  }
}

// Inline JSON, or @path to read a file.
json load_spec(const std::string& arg, const std::string& what) {
  if (!arg.empty() && arg.front() == '@') return io::load_json_file(arg.substr(1));
  return io::parse_json(arg, what);
}

bi::Unit parse_units(const std::string& name) {
  if (name == "bits") return bi::Unit::bits;
  if (name == "nats") return bi::Unit::nats;
  bi::fail(bi::errc::bad_input, "unknown units '" + name + "' (use bits or nats)");
}

bi::FisherMethod parse_method(const std::string& name) {
  if (name == "auto") return bi::FisherMethod::automatic;
  if (name == "analytic") return bi::FisherMethod::analytic;
  if (name == "fd") return bi::FisherMethod::finite_difference;
  bi::fail(bi::errc::bad_input, "unknown method '" + name + "' (use auto, analytic, or fd)");
}

void emit(const json& payload) { std::cout << payload.dump(2) << '\n'; }

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bi::fail(bi::errc::bad_input, "cannot write '" + path.string() + "'");
  out << text;
}

int resolve_jobs(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("BELIEF_INFO_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 0;  // library picks hardware concurrency
}

// --- measure ----------------------------------------------------------------

struct MeasureOpts {
  std::string view, q1, q0, probs, joint, eta;
  std::string units = "bits";
  double order = 1.0;
  std::int64_t outcome = 0;
};

void add_measure(CLI::App& app, const std::shared_ptr<MeasureOpts>& opt) {
  auto* measure = app.add_subcommand("measure", "Point evaluations of information measures");
  measure->require_subcommand(1);

  auto add_units = [&](CLI::App* cmd) {
    cmd->add_option("--units", opt->units, "Output units: bits or nats")->capture_default_str();
  };

  auto* info = measure->add_subcommand("info", "Information assessed inside a view");
  info->add_option("--view", opt->view, "View weights (JSON array or @file)")->required();
  info->add_option("--q1", opt->q1, "Updated belief")->required();
  info->add_option("--q0", opt->q0, "Reference belief")->required();
  add_units(info);
  info->callback([opt] {
    const auto result = bi::info(io::parse_weights(load_spec(opt->view, "view"), "view"),
                                 io::parse_weights(load_spec(opt->q1, "q1"), "q1"),
                                 io::parse_weights(load_spec(opt->q0, "q0"), "q0"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* density = measure->add_subcommand("density", "Pointwise log-ratio at one outcome");
  density->add_option("--q1", opt->q1, "Updated belief")->required();
  density->add_option("--q0", opt->q0, "Reference belief")->required();
  density->add_option("--outcome", opt->outcome, "Outcome index")->required();
  add_units(density);
  density->callback([opt] {
    const auto result = bi::info_density(io::parse_weights(load_spec(opt->q1, "q1"), "q1"),
                                         io::parse_weights(load_spec(opt->q0, "q0"), "q0"),
                                         opt->outcome);
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* entropy = measure->add_subcommand("entropy", "Shannon entropy");
  entropy->add_option("--probs", opt->probs, "Distribution")->required();
  add_units(entropy);
  entropy->callback([opt] {
    const auto result = bi::entropy(io::parse_categorical(load_spec(opt->probs, "probs"), "probs"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* cross = measure->add_subcommand("cross-entropy", "Cross entropy inside a view");
  cross->add_option("--view", opt->view, "View weights")->required();
  cross->add_option("--probs", opt->probs, "Assessed distribution")->required();
  add_units(cross);
  cross->callback([opt] {
    const auto result = bi::cross_entropy(io::parse_weights(load_spec(opt->view, "view"), "view"),
                                          io::parse_weights(load_spec(opt->probs, "probs"), "probs"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* realization = measure->add_subcommand("realization", "Realized-outcome information");
  realization->add_option("--probs", opt->probs, "Distribution")->required();
  realization->add_option("--outcome", opt->outcome, "Realized outcome index")->required();
  add_units(realization);
  realization->callback([opt] {
    const auto result = bi::realization_info(
        io::parse_categorical(load_spec(opt->probs, "probs"), "probs"), opt->outcome);
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* kl = measure->add_subcommand("kl", "Divergence of q1 from q0");
  kl->add_option("--q1", opt->q1, "Updated belief")->required();
  kl->add_option("--q0", opt->q0, "Reference belief")->required();
  add_units(kl);
  kl->callback([opt] {
    const auto result = bi::kl(io::parse_categorical(load_spec(opt->q1, "q1"), "q1"),
                               io::parse_weights(load_spec(opt->q0, "q0"), "q0"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* lindley = measure->add_subcommand("lindley", "Entropy difference H(q1) - H(q0)");
  lindley->add_option("--q1", opt->q1, "Updated belief")->required();
  lindley->add_option("--q0", opt->q0, "Reference belief")->required();
  add_units(lindley);
  lindley->callback([opt] {
    const auto result = bi::lindley_info(io::parse_categorical(load_spec(opt->q1, "q1"), "q1"),
                                         io::parse_categorical(load_spec(opt->q0, "q0"), "q0"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* mutual = measure->add_subcommand("mutual", "Mutual information of a joint grid");
  mutual->add_option("--joint", opt->joint, "Joint distribution (nested JSON array)")->required();
  add_units(mutual);
  mutual->callback([opt] {
    const auto result =
        bi::mutual_information(io::parse_joint(load_spec(opt->joint, "joint"), "joint"));
    emit(io::value_envelope(result, parse_units(opt->units)));
  });

  auto* pseudo = measure->add_subcommand("pseudometric", "L^p distance between beliefs in a view");
  pseudo->add_option("--view", opt->view, "View weights")->required();
  pseudo->add_option("--q1", opt->q1, "First belief")->required();
  pseudo->add_option("--q0", opt->q0, "Second belief")->required();
  pseudo->add_option("--order", opt->order, "Order p >= 1")->capture_default_str();
  add_units(pseudo);
  pseudo->callback([opt] {
    const bi::Unit unit = parse_units(opt->units);
    const double nats = bi::pseudometric_lp(io::parse_weights(load_spec(opt->view, "view"), "view"),
                                            io::parse_weights(load_spec(opt->q1, "q1"), "q1"),
                                            io::parse_weights(load_spec(opt->q0, "q0"), "q0"),
                                            opt->order);
    emit(io::scalar_envelope(bi::nats_to(nats, unit), io::unit_name(unit)));
  });

  auto* variance = measure->add_subcommand("variance", "Variance of information in a view");
  variance->add_option("--view", opt->view, "View weights")->required();
  variance->add_option("--q1", opt->q1, "Updated belief")->required();
  variance->add_option("--q0", opt->q0, "Reference belief")->required();
  add_units(variance);
  variance->callback([opt] {
    const bi::Unit unit = parse_units(opt->units);
    const double nats2 = bi::info_variance(io::parse_weights(load_spec(opt->view, "view"), "view"),
                                           io::parse_weights(load_spec(opt->q1, "q1"), "q1"),
                                           io::parse_weights(load_spec(opt->q0, "q0"), "q0"));
    emit(io::scalar_envelope(bi::nats_to(bi::nats_to(nats2, unit), unit),
                             io::unit_squared_name(unit)));
  });

  auto* perturb = measure->add_subcommand("perturbation", "Directional derivative of information");
  perturb->add_option("--view", opt->view, "View weights")->required();
  perturb->add_option("--q1", opt->q1, "Belief being perturbed")->required();
  perturb->add_option("--eta", opt->eta, "Perturbation direction (sums to zero)")->required();
  add_units(perturb);
  perturb->callback([opt] {
    const bi::Unit unit = parse_units(opt->units);
    const double nats = bi::perturbation_derivative(
        io::parse_weights(load_spec(opt->view, "view"), "view"),
        io::parse_categorical(load_spec(opt->q1, "q1"), "q1"),
        io::parse_array(load_spec(opt->eta, "eta"), "eta"));
    emit(io::scalar_envelope(bi::nats_to(nats, unit), io::unit_name(unit)));
  });
}

// --- critical ----------------------------------------------------------------

struct CriticalOpts {
  std::string q0, constraints, prior, likelihood;
  std::string units = "bits";
  std::int64_t size = 0;
  double lambda = 1.0;
  double target = 0.0;
  double tol = 1e-10;
};

void add_critical(CLI::App& app, const std::shared_ptr<CriticalOpts>& opt) {
  auto* critical =
      app.add_subcommand("critical", "Information-critical distributions and annealing");
  critical->require_subcommand(1);

  auto* maxent = critical->add_subcommand("maxent", "Maximum-entropy distribution");
  maxent->add_option("--size", opt->size, "Support size")->required();
  maxent->add_option("--constraints", opt->constraints, "Expectation constraints (JSON or @file)");
  maxent->add_option("--tol", opt->tol, "Residual tolerance")->capture_default_str();
  maxent->callback([opt] {
    std::vector<bi::ExpectationConstraint> constraints;
    if (!opt->constraints.empty()) {
      constraints =
          io::parse_constraints(load_spec(opt->constraints, "constraints"), "constraints");
    }
    emit(io::solver_report(bi::max_entropy_distribution(opt->size, constraints, opt->tol)));
  });

  auto* min_info = critical->add_subcommand("min-info", "Closest distribution to a reference");
  min_info->add_option("--q0", opt->q0, "Reference weights")->required();
  min_info->add_option("--constraints", opt->constraints, "Expectation constraints");
  min_info->add_option("--tol", opt->tol, "Residual tolerance")->capture_default_str();
  min_info->callback([opt] {
    std::vector<bi::ExpectationConstraint> constraints;
    if (!opt->constraints.empty()) {
      constraints =
          io::parse_constraints(load_spec(opt->constraints, "constraints"), "constraints");
    }
    emit(io::solver_report(bi::min_info_distribution(
        io::parse_weights(load_spec(opt->q0, "q0"), "q0"), constraints, opt->tol)));
  });

  auto* anneal = critical->add_subcommand("anneal", "Posterior with tempered likelihood");
  anneal->add_option("--prior", opt->prior, "Prior distribution")->required();
  anneal->add_option("--likelihood", opt->likelihood, "Likelihood weights")->required();
  anneal->add_option("--lambda", opt->lambda, "Tempering exponent")->capture_default_str();
  anneal->callback([opt] {
    const bi::Categorical annealed =
        bi::anneal(io::parse_categorical(load_spec(opt->prior, "prior"), "prior"),
                   io::parse_weights(load_spec(opt->likelihood, "likelihood"), "likelihood"),
                   opt->lambda);
    json payload;
    payload["probs"] = std::vector<double>(annealed.probs().begin(), annealed.probs().end());
    payload["lambda"] = opt->lambda;
    emit(payload);
  });

  auto* solve = critical->add_subcommand("anneal-solve", "Exponent that hits a target information");
  solve->add_option("--prior", opt->prior, "Prior distribution")->required();
  solve->add_option("--likelihood", opt->likelihood, "Likelihood weights")->required();
  solve->add_option("--target-info", opt->target, "Information from prior to annealed posterior")
      ->required();
  solve->add_option("--units", opt->units, "Units of --target-info and of the report")
      ->capture_default_str();
  solve->add_option("--tol", opt->tol, "Bisection tolerance, nats")->capture_default_str();
  solve->callback([opt] {
    const bi::Unit unit = parse_units(opt->units);
    const bi::AnnealingSolution solution = bi::solve_annealing_lambda(
        io::parse_categorical(load_spec(opt->prior, "prior"), "prior"),
        io::parse_weights(load_spec(opt->likelihood, "likelihood"), "likelihood"),
        bi::to_nats(opt->target, unit), opt->tol);
    json payload;
    payload["lambda"] = solution.lambda;
    payload["probs"] =
        std::vector<double>(solution.annealed.probs().begin(), solution.annealed.probs().end());
    payload[std::string("achieved_info_") + io::unit_name(unit)] =
        bi::nats_to(solution.achieved_info, unit);
    emit(payload);
  });
}

// --- simulate ----------------------------------------------------------------

struct SimulateOpts {
  std::string config;
  std::string out;
  std::string scenario;
  std::string units = "bits";
  std::uint64_t seed = 0;
  std::int64_t num = 0;
  int jobs = 0;
  bool records = false;
};

void add_simulate(CLI::App& app, const std::shared_ptr<SimulateOpts>& opt) {
  auto* simulate = app.add_subcommand("simulate", "Seeded repeated-inference ensembles");
  simulate->add_option("--config", opt->config, "Config JSON (inline or @file)");
  auto* seed_opt = simulate->add_option("--seed", opt->seed, "Master seed");
  simulate->add_option("--num", opt->num, "Number of experiments (overrides config)");
  simulate->add_option("--scenario", opt->scenario, "genuine or inconsistent (overrides config)");
  simulate->add_option("--jobs", opt->jobs, "Worker threads (env BELIEF_INFO_JOBS, then cores)");
  simulate->add_option("--out", opt->out, "Output directory")->required();
  simulate->add_option("--units", opt->units, "Units for serialized values")
      ->capture_default_str();
  simulate->add_flag("--records", opt->records, "Also write the per-record table");
  simulate->callback([opt, seed_opt] {
    const bi::Unit unit = parse_units(opt->units);
    json config_json = json::object();
    if (!opt->config.empty()) config_json = load_spec(opt->config, "config");
    bi::ExperimentConfig config = io::parse_experiment_config(config_json);
    if (seed_opt->count() > 0) {
      config.master_seed = opt->seed;
    } else if (!config_json.contains("master_seed")) {
      config.master_seed = fresh_seed();
      std::cerr << "seed not given; using " << config.master_seed << '\n';
    }
    if (opt->num > 0) config.num_experiments = opt->num;
    if (!opt->scenario.empty()) config.scenario = io::parse_scenario(opt->scenario);

    const bi::EnsembleResult result =
        bi::run_ensemble(config, resolve_jobs(opt->jobs), opt->records);

    const std::filesystem::path dir(opt->out);
    std::filesystem::create_directories(dir);
    const json summary = io::ensemble_summary_json(result.summary, unit);
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    {
      std::ofstream csv(dir / "histograms.csv", std::ios::binary);
      if (!csv) bi::fail(bi::errc::bad_input, "cannot write histograms.csv");
      io::write_histograms_csv(csv, result.summary, unit);
    }
    if (opt->records) {
      std::ofstream csv(dir / "records.csv", std::ios::binary);
      if (!csv) bi::fail(bi::errc::bad_input, "cannot write records.csv");
      io::write_records_csv(csv, result.rows, unit);
    }
    emit(summary);
  });
}

// --- labels ------------------------------------------------------------------

struct LabelsOpts {
  std::string input;
  std::string out;
  std::string format = "json";
  std::int64_t num = 10000;
  int classes = 10;
  double confidence = 0.9;
  double mislabel = 0.0;
  std::uint64_t seed = 0;
  int bins = 200;
};

void add_labels(CLI::App& app, const std::shared_ptr<LabelsOpts>& opt) {
  auto* labels = app.add_subcommand("labels", "Per-record label information");
  labels->require_subcommand(1);

  auto* analyze = labels->add_subcommand("analyze", "Score a prediction CSV");
  analyze->add_option("--input", opt->input, "Prediction CSV path")->required();
  analyze->add_option("--bins", opt->bins, "Histogram bins")->capture_default_str();
  analyze->add_option("--format", opt->format, "stdout format: json or csv")
      ->capture_default_str();
  analyze->add_option("--out", opt->out, "Directory for label_records.csv");
  analyze->callback([opt] {
    std::ifstream in(opt->input);
    if (!in) bi::fail(bi::errc::bad_input, "cannot open '" + opt->input + "'");
    const auto records = bi::read_prediction_csv(in);
    const bi::LabelInfoReport report = bi::analyze(records, opt->bins);
    if (!opt->out.empty()) {
      const std::filesystem::path dir(opt->out);
      std::filesystem::create_directories(dir);
      std::ofstream csv(dir / "label_records.csv", std::ios::binary);
      if (!csv) bi::fail(bi::errc::bad_input, "cannot write label_records.csv");
      bi::write_record_info_csv(csv, report.records);
    }
    if (opt->format == "csv") {
      bi::write_record_info_csv(std::cout, report.records);
    } else if (opt->format == "json") {
      emit(io::label_report_json(report));
    } else {
      bi::fail(bi::errc::bad_input, "unknown format '" + opt->format + "'");
    }
  });

  auto* synth = labels->add_subcommand("synth", "Generate a synthetic prediction corpus");
  synth->add_option("--num", opt->num, "Number of records")->capture_default_str();
  synth->add_option("--classes", opt->classes, "Number of classes")->capture_default_str();
  synth->add_option("--confidence", opt->confidence, "Probability on the true class")
      ->capture_default_str();
  synth->add_option("--mislabel", opt->mislabel, "Fraction of wrong labels")
      ->capture_default_str();
  auto* seed_opt = synth->add_option("--seed", opt->seed, "Generator seed");
  synth->add_option("--out", opt->out, "Output directory")->required();
  synth->callback([opt, seed_opt] {
    std::uint64_t seed = opt->seed;
    if (seed_opt->count() == 0) {
      seed = fresh_seed();
      std::cerr << "seed not given; using " << seed << '\n';
    }
    const bi::SyntheticCorpus corpus =
        bi::generate_synthetic(opt->num, opt->classes, opt->confidence, opt->mislabel, seed);
    const std::filesystem::path dir(opt->out);
    std::filesystem::create_directories(dir);
    {
      std::ofstream csv(dir / "synthetic_records.csv", std::ios::binary);
      if (!csv) bi::fail(bi::errc::bad_input, "cannot write synthetic_records.csv");
      bi::write_prediction_csv(csv, corpus.records);
    }
    {
      std::ofstream csv(dir / "synthetic_truth.csv", std::ios::binary);
      if (!csv) bi::fail(bi::errc::bad_input, "cannot write synthetic_truth.csv");
      bi::write_truth_csv(csv, corpus);
    }
    json payload;
    payload["num_records"] = opt->num;
    payload["num_classes"] = opt->classes;
    payload["seed"] = seed;
    payload["records_csv"] = (dir / "synthetic_records.csv").string();
    payload["truth_csv"] = (dir / "synthetic_truth.csv").string();
    emit(payload);
  });
}

// --- fisher ------------------------------------------------------------------

struct FisherOpts {
  std::string family, view, theta, q0;
  std::string method = "auto";
  std::string units = "bits";
};

void add_fisher(CLI::App& app, const std::shared_ptr<FisherOpts>& opt) {
  auto* fisher = app.add_subcommand("fisher", "Score and curvature of assessed information");
  fisher
      ->add_option("--family", opt->family,
                   "Family spec: {\"type\":\"gaussian-location\",\"noise_cov\":[[..]]} or "
                   "{\"type\":\"categorical-softmax\",\"kernel\":[[..]]}")
      ->required();
  fisher->add_option("--view", opt->view, "View: Gaussian {mean,cov} or weight array")
      ->required();
  fisher->add_option("--theta", opt->theta, "Parameter point (JSON array)")->required();
  fisher->add_option("--q0", opt->q0, "Optional reference belief");
  fisher->add_option("--method", opt->method, "auto, analytic, or fd")->capture_default_str();
  fisher->add_option("--units", opt->units, "Output units")->capture_default_str();
  fisher->callback([opt] {
    const bi::Unit unit = parse_units(opt->units);
    const bi::FisherMethod method = parse_method(opt->method);
    const double scale = bi::nats_to(1.0, unit);
    const json family = load_spec(opt->family, "family");
    if (!family.is_object() || !family.contains("type") || !family["type"].is_string()) {
      bi::fail(bi::errc::bad_input, "family spec needs a string 'type'");
    }
    const std::string type = family["type"].get<std::string>();
    const Eigen::VectorXd theta =
        io::parse_array(load_spec(opt->theta, "theta"), "theta").matrix();

    Eigen::VectorXd score;
    Eigen::MatrixXd matrix;
    if (type == "gaussian-location") {
      if (!family.contains("noise_cov")) {
        bi::fail(bi::errc::bad_input, "gaussian-location family needs noise_cov");
      }
      const bi::LocationModel model(
          io::parse_dense_matrix(family["noise_cov"], "family.noise_cov"));
      const bi::Gaussian view = io::parse_gaussian(load_spec(opt->view, "view"), "view");
      std::optional<bi::Gaussian> q0;
      if (!opt->q0.empty()) q0 = io::parse_gaussian(load_spec(opt->q0, "q0"), "q0");
      score = bi::fisher_score(view, model, q0, theta, method);
      matrix = bi::fisher_matrix(view, model, q0, theta, method);
    } else if (type == "categorical-softmax") {
      if (!family.contains("kernel")) {
        bi::fail(bi::errc::bad_input, "categorical-softmax family needs kernel");
      }
      const bi::DiscreteFamily discrete =
          bi::categorical_softmax_family(io::parse_dense_matrix(family["kernel"], "family.kernel"));
      const bi::BeliefWeights view = io::parse_weights(load_spec(opt->view, "view"), "view");
      const bi::BeliefWeights q0 =
          opt->q0.empty() ? bi::BeliefWeights::unit(view.size())
                          : io::parse_weights(load_spec(opt->q0, "q0"), "q0");
      score = bi::fisher_score(view, discrete, q0, theta, method);
      matrix = bi::fisher_matrix(view, discrete, q0, theta, method);
    } else {
      bi::fail(bi::errc::bad_input, "unknown family type '" + type + "'");
    }

    json payload;
    payload["score"] = std::vector<double>(score.begin(), score.end());
    json rows = json::array();
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      rows.push_back(std::vector<double>(matrix.row(r).begin(), matrix.row(r).end()));
    }
    payload["matrix"] = std::move(rows);
    payload["units"] = io::unit_name(unit);
    if (scale != 1.0) {
      for (auto& v : payload["score"]) v = v.get<double>() * scale;
      for (auto& row : payload["matrix"]) {
        for (auto& v : row) v = v.get<double>() * scale;
      }
    }
    emit(payload);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information as expected change of belief: measures, Gaussian inference studies, "
               "critical distributions, and label diagnostics"};
  app.require_subcommand(1);

  auto measure_opts = std::make_shared<MeasureOpts>();
  auto critical_opts = std::make_shared<CriticalOpts>();
  auto simulate_opts = std::make_shared<SimulateOpts>();
  auto labels_opts = std::make_shared<LabelsOpts>();
  auto fisher_opts = std::make_shared<FisherOpts>();
  add_measure(app, measure_opts);
  add_critical(app, critical_opts);
  add_simulate(app, simulate_opts);
  add_labels(app, labels_opts);
  add_fisher(app, fisher_opts);

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json envelope = {{"error", {{"code", "bad_input"}, {"message", e.what()}}}};
    std::cout << envelope.dump(2) << '\n';
    return 2;
  } catch (const bi::Error& e) {
    std::cout << io::error_envelope(e).dump(2) << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json envelope = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cout << envelope.dump(2) << '\n';
    return 3;
  }
}
