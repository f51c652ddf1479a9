#include "mixtv/cli.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixtv/coupling.h"
#include "mixtv/error.h"
#include "mixtv/estimator.h"
#include "mixtv/instance_io.h"
#include "mixtv/oracle.h"
#include "mixtv/subcube.h"

namespace mixtv::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Report {
  json command = json::array();
  std::string digest;
  json result = json::object();
  json warnings = json::array();
  std::optional<double> seconds;

  json to_json() const {
    json doc{{"command", command}, {"instance_digest", digest}, {"result", result}, {"warnings", warnings}};
    if (seconds) doc["timing"] = {{"elapsed_seconds", *seconds}};
    return doc;
  }
};

int default_workers() {
  const char* env = std::getenv(kWorkersEnv);
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 1024) {
    throw Error(ErrorKind::kInvalidArgument, std::string(kWorkersEnv) + " must be an integer in [1, 1024]");
  }
  return static_cast<int>(value);
}

struct Loaded {
  Instance instance;
  std::string digest;
};

Loaded load(const std::string& path) {
  const json doc = load_json(path);
  return Loaded{parse_instance(doc), instance_digest(doc)};
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooLarge: return kExitTooLarge;
    case ErrorKind::kInvalidArgument: return kExitUsage;
    default: return kExitValidation;
  }
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void write_file(const std::string& path, const json& doc) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  file << doc.dump(2) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total variation distance between mixtures of product distributions.", "mixtv"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string input;
  bool timing = false;

  // approx
  auto* approx = app.add_subcommand("approx", "Estimate the TV distance to relative error epsilon");
  approx->add_option("--input", input, "Instance JSON file")->required();
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> samples;
  std::optional<double> gamma;
  std::optional<int> workers;
  int repetitions = 1;
  std::size_t max_states = CouplingDag::kDefaultMaxStates;
  approx->add_option("--epsilon", epsilon, "Relative error")->capture_default_str();
  approx->add_option("--seed", seed, "Random seed")->capture_default_str();
  approx->add_option("--samples", samples, "Sample count override");
  approx->add_option("--gamma", gamma, "Coarseness ratio override in (0, 1]");
  approx->add_option("--workers", workers, std::string("Worker threads (default from ") + kWorkersEnv + " or 1)");
  approx->add_option("--repetitions", repetitions, "Report the median of this many independent runs")
      ->capture_default_str();
  approx->add_option("--max-states", max_states, "State ceiling for the coupling graph")->capture_default_str();
  approx->add_flag("--timing", timing, "Include elapsed time in the report");

  auto* exact = app.add_subcommand("exact-subcube", "Exact TV distance between mixtures of Boolean subcubes");
  exact->add_option("--input", input, "Instance JSON file")->required();
  exact->add_flag("--timing", timing, "Include elapsed time in the report");

  auto* brute = app.add_subcommand("brute", "Exhaustive TV distance (q^n <= 2^24)");
  brute->add_option("--input", input, "Instance JSON file")->required();
  brute->add_flag("--timing", timing, "Include elapsed time in the report");

  auto* stats = app.add_subcommand("coupling-stats", "Build the coupling graph and report its size");
  stats->add_option("--input", input, "Instance JSON file")->required();
  std::string dump_path;
  stats->add_option("--dump", dump_path, "Write the full graph as JSON to this file");
  stats->add_option("--max-states", max_states, "State ceiling for the coupling graph")->capture_default_str();
  stats->add_flag("--timing", timing, "Include elapsed time in the report");

  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  std::string output;
  auto* gen_random = gen->add_subcommand("random", "Random instance");
  int n = 0;
  int q = 0;
  int k1 = 0;
  int k2 = 0;
  bool subcube = false;
  gen_random->add_option("--n", n, "Dimension")->required();
  gen_random->add_option("--q", q, "Alphabet size")->required();
  gen_random->add_option("--k1", k1, "Components of P")->required();
  gen_random->add_option("--k2", k2, "Components of Q")->required();
  gen_random->add_option("--seed", seed, "Random seed")->required();
  gen_random->add_flag("--subcube", subcube, "Draw Boolean subcube components");
  gen_random->add_option("--output", output, "Also write the bare instance to this file");
  auto* gen_cnf = gen->add_subcommand("from-cnf", "Instance encoding the model count of a 3-CNF formula");
  std::string dimacs;
  gen_cnf->add_option("--dimacs", dimacs, "DIMACS CNF file")->required();
  gen_cnf->add_option("--output", output, "Also write the bare instance to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    write_error(err, "UsageError", e.what());
    return kExitUsage;
  }

  Report report;
  for (int i = 1; i < argc; ++i) report.command.push_back(argv[i]);
  const auto start = Clock::now();
  std::string summary;

  try {
    if (approx->parsed()) {
      EstimatorConfig config;
      config.epsilon = epsilon;
      config.seed = seed;
      config.samples_override = samples;
      config.gamma_override = gamma;
      config.workers = workers.value_or(default_workers());
      config.repetitions = repetitions;
      config.max_states = max_states;
      const Loaded loaded = load(input);
      report.digest = loaded.digest;
      if (samples || gamma) {
        report.warnings.push_back(
            "sample count override in effect: the 99% guarantee rests on the chosen gamma, not the worst case");
      }
      const TvEstimate est = approximate_tv(loaded.instance.p, loaded.instance.q, config);
      report.result = {{"estimate", est.estimate},   {"discrepancy", est.discrepancy},
                       {"fbar", est.fbar},           {"gamma", est.gamma},
                       {"samples", est.samples},     {"seed", est.seed},
                       {"epsilon", config.epsilon},  {"repetitions", est.repetitions},
                       {"workers", config.workers}};
      summary = "approx: estimate " + std::to_string(est.estimate) + " from " + std::to_string(est.samples) +
                " samples";
    } else if (exact->parsed()) {
      const Loaded loaded = load(input);
      report.digest = loaded.digest;
      const double tv = exact_subcube_tv(loaded.instance.p, loaded.instance.q);
      report.result = {{"tv", tv},
                       {"n", loaded.instance.p.n()},
                       {"k1", loaded.instance.p.k()},
                       {"k2", loaded.instance.q.k()}};
      summary = "exact-subcube: tv " + std::to_string(tv);
    } else if (brute->parsed()) {
      const Loaded loaded = load(input);
      report.digest = loaded.digest;
      const double tv = brute_force_tv(loaded.instance.p, loaded.instance.q);
      report.result = {{"tv", tv}, {"n", loaded.instance.p.n()}, {"q", loaded.instance.p.q()}};
      summary = "brute: tv " + std::to_string(tv);
    } else if (stats->parsed()) {
      const Loaded loaded = load(input);
      report.digest = loaded.digest;
      const Mixture& p = loaded.instance.p;
      const Mixture& qd = loaded.instance.q;
      const CouplingDag dag = build_dag(p, qd, max_states);
      const double bound = state_bound(p.n(), p.q(), p.k(), qd.k());
      report.result = {{"states", dag.state_count()},
                       {"transient_states", dag.size()},
                       {"transitions", dag.transition_count()},
                       {"discrepancy", failure_probability(dag)},
                       {"layer_histogram", layer_histogram(dag)},
                       {"state_bound", bound},
                       {"within_bound", static_cast<double>(dag.state_count()) <= bound}};
      if (!dump_path.empty()) write_file(dump_path, dump_dag(dag));
      summary = "coupling-stats: " + std::to_string(dag.state_count()) + " states, bound " + std::to_string(bound);
    } else if (gen_random->parsed()) {
      const Instance instance =
          random_instance(n, q, k1, k2, seed, subcube ? InstanceFamily::kSubcube : InstanceFamily::kGeneral);
      const json doc = to_json(instance);
      report.digest = instance_digest(doc);
      report.result = {{"instance", doc}};
      if (!output.empty()) write_file(output, doc);
      summary = "gen random: n " + std::to_string(n) + ", q " + std::to_string(q);
    } else if (gen_cnf->parsed()) {
      std::ifstream file(dimacs);
      if (!file) throw Error(ErrorKind::kParseError, "cannot open " + dimacs);
      const CnfFormula formula = parse_dimacs(file);
      const CnfInstance built = generate_3cnf_instance(formula);
      const json doc = to_json(Instance{built.p, built.q});
      report.digest = instance_digest(doc);
      report.result = {{"instance", doc},
                       {"predicted_tv", built.predicted_tv},
                       {"sat_count", built.sat_count},
                       {"variables", formula.variables},
                       {"clauses", formula.clauses.size()},
                       {"padded_variables", built.padded_variables}};
      if (!output.empty()) write_file(output, doc);
      summary = "gen from-cnf: predicted tv " + std::to_string(built.predicted_tv);
    }
  } catch (const Error& e) {
    write_error(err, error_kind_name(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what());
    return kExitInternal;
  }

  const std::chrono::duration<double> elapsed = Clock::now() - start;
  if (timing) report.seconds = elapsed.count();
  out << report.to_json().dump(2) << "\n";
  err << summary << " (" << elapsed.count() << " s)\n";
  return kExitOk;
}

}  // namespace mixtv::cli
