#include "ncerm/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncerm/analysis.hpp"
#include "ncerm/boostnet.hpp"
#include "ncerm/csv.hpp"
#include "ncerm/data.hpp"
#include "ncerm/experiment.hpp"
#include "ncerm/halfspace.hpp"
#include "ncerm/hardness.hpp"
#include "ncerm/neuralnet.hpp"

namespace ncerm {

namespace {

// Reads a JSON object into CLI11 config items. Nested objects name
// subcommands, e.g. {"seed": 3, "boostnet": {"gamma": 0.2}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("unsupported config value: " + v.dump());
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        std::vector<std::string> nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Common {
  std::uint64_t seed = 0;
  std::string out_path;
  std::uint64_t budget_rounds = 0;  // 0: subcommand default
  double epsilon = 0.0;             // 0: subcommand default
  double delta = 0.1;
};

// Writes CSV to --out when given, otherwise to stdout. Summaries go to
// stdout only when the CSV went to a file.
class Output {
 public:
  Output(const Common& common, std::ostream& out) : out_(out) {
    if (!common.out_path.empty()) {
      file_ = std::make_unique<std::ofstream>(common.out_path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open output file: " + common.out_path);
    }
  }
  std::ostream& csv() { return file_ ? *file_ : out_; }
  std::ostream& summary() { return file_ ? out_ : null_; }

 private:
  std::ostream& out_;
  std::unique_ptr<std::ofstream> file_;
  std::ostringstream null_;
};

std::uint64_t or_default(std::uint64_t value, std::uint64_t fallback) {
  return value > 0 ? value : fallback;
}

double or_default(double value, double fallback) { return value > 0.0 ? value : fallback; }

WeightedDataset load_dataset(const std::string& path, double q) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  return read_dataset_csv(in, q);
}

// ---------------------------------------------------------------- halfspace

struct HalfspaceArgs {
  std::string algorithm = "least_squares";
  std::string data_path;
  std::string loss = "piecewise_linear";
  double lipschitz = 1.0;
  int dim = 5;
  std::size_t n = 200;
  double margin = 0.3;
  double p = 2.0;
  double noise = 0.0;
  int refine = 0;
  int k = 0;
  int repetitions = 1;
};

void add_halfspace(CLI::App& app, HalfspaceArgs& a) {
  app.add_option("--algorithm", a.algorithm, "sphere or least_squares")
      ->check(CLI::IsMember({"sphere", "least_squares"}))
      ->capture_default_str();
  app.add_option("--data", a.data_path, "CSV dataset (x_1..x_d,y,weight); planted data when omitted");
  app.add_option("--loss", a.loss, "piecewise_linear, logistic_sigmoid or neg_min")->capture_default_str();
  app.add_option("--lipschitz", a.lipschitz, "Lipschitz constant L of the loss")->capture_default_str();
  app.add_option("--dim", a.dim, "planted data dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--n", a.n, "planted sample size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--margin", a.margin, "planted margin")->capture_default_str();
  app.add_option("--p", a.p, "constraint exponent p in [1, 2]")->capture_default_str();
  app.add_option("--noise", a.noise, "label flip rate applied to planted data")->capture_default_str();
  app.add_option("--refine", a.refine, "refinement steps per round")->capture_default_str();
  app.add_option("--k", a.k, "resample size override (least_squares)");
  app.add_option("--repetitions", a.repetitions, "independent runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int run_halfspace(const Common& common, const HalfspaceArgs& a, std::ostream& out) {
  Output output(common, out);
  const LossFunction loss = parse_loss(a.loss, a.lipschitz);
  const bool sphere = a.algorithm == "sphere";
  const double p = sphere ? 2.0 : a.p;
  const bool planted = a.data_path.empty();
  const double epsilon = or_default(common.epsilon, 0.25);

  csv::Writer writer(output.csv());
  if (planted) {
    writer.header({"run", "rounds", "best_round", "loss", "train_zero_one", "planted_loss"});
  } else {
    writer.header({"run", "rounds", "best_round", "loss", "train_zero_one"});
  }
  for (int r = 0; r < a.repetitions; ++r) {
    const auto run = static_cast<std::uint64_t>(r);
    WeightedDataset data;
    LinearModel reference;
    if (planted) {
      PlantedHalfspace gen = planted_halfspace(a.dim, a.n, a.margin, p,
                                               derive_seed(common.seed, stream::kData, run));
      data = a.noise > 0.0 ? flip_labels(gen.data, a.noise, derive_seed(common.seed, stream::kLabels, run))
                           : gen.data;
      reference = gen.separator;
    } else {
      data = load_dataset(a.data_path, dual_exponent(p));
    }
    HalfspaceRunConfig config =
        sphere ? config_alg1(data.size(), static_cast<int>(data.dim()), epsilon, common.delta)
               : config_alg2(data.size(), static_cast<int>(data.dim()), p, epsilon, common.delta);
    if (!sphere && a.k > 0) config.k = a.k;
    config.t_budget = or_default(common.budget_rounds, 1000);
    config.seed = derive_seed(common.seed, sphere ? stream::kAlgorithm1 : stream::kResampledRounds, run);
    HalfspaceOptions options;
    options.refine_budget = a.refine;
    const HalfspaceResult fit = sphere ? algorithm1(data, loss, config, options)
                                       : algorithm2(data, loss, config, options);
    const Vector scores = fit.model.scores(data.features());
    std::vector<std::string> row{std::to_string(r), std::to_string(fit.rounds),
                                 std::to_string(fit.best_round), csv::format(fit.loss),
                                 csv::format(zero_one_risk(scores, data))};
    if (planted) {
      row.push_back(csv::format(empirical_risk(reference.scores(data.features()), loss, data)));
    }
    writer.row(row);
    output.summary() << "run " << r << ": loss " << fit.loss << " after " << fit.rounds
                     << " rounds (closed-form T = " << config.t_theory.value << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------------- nn

struct NetworkArgs {
  std::string data_path;
  std::string network_out;
  std::string loss = "piecewise_linear";
  double lipschitz = 1.0;
  int depth = 2;
  double budget = 1.0;
  double leaf_p = 2.0;
  std::string activation = "tanh";
  int dim = 5;
  std::size_t n = 200;
  double margin = 0.1;
  int width = 3;
  int k = 0;
  int s = 0;
  int refine = 0;
  int repetitions = 1;
};

void add_network_class(CLI::App& app, int& depth, double& budget, double& leaf_p,
                       std::string& activation) {
  app.add_option("--depth", depth, "network depth m")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--budget", budget, "per-unit weight budget B")->capture_default_str();
  app.add_option("--leaf-p", leaf_p, "leaf norm exponent p in (1, 2]")->capture_default_str();
  app.add_option("--activation", activation, "tanh, erf or clamp")
      ->check(CLI::IsMember({"tanh", "erf", "clamp"}))
      ->capture_default_str();
}

void add_nn(CLI::App& app, NetworkArgs& a) {
  add_network_class(app, a.depth, a.budget, a.leaf_p, a.activation);
  app.add_option("--data", a.data_path, "CSV dataset; planted network data when omitted");
  app.add_option("--network-out", a.network_out, "write the best network of the last run as JSON");
  app.add_option("--loss", a.loss, "piecewise_linear, logistic_sigmoid or neg_min")->capture_default_str();
  app.add_option("--lipschitz", a.lipschitz, "Lipschitz constant L of the loss")->capture_default_str();
  app.add_option("--dim", a.dim, "planted data dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--n", a.n, "planted sample size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--margin", a.margin, "planted margin")->capture_default_str();
  app.add_option("--width", a.width, "hidden width of the planted network")->capture_default_str();
  app.add_option("--k", a.k, "resample size override");
  app.add_option("--s", a.s, "children per hidden unit override");
  app.add_option("--refine", a.refine, "refinement steps per round")->capture_default_str();
  app.add_option("--repetitions", a.repetitions, "independent runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

NetworkClassSpec make_spec(int depth, double budget, double leaf_p, const std::string& activation) {
  NetworkClassSpec spec;
  spec.depth = depth;
  spec.budget = budget;
  spec.leaf_p = leaf_p;
  spec.activation = parse_activation(activation);
  return spec;
}

int run_nn(const Common& common, const NetworkArgs& a, std::ostream& out) {
  Output output(common, out);
  const LossFunction loss = parse_loss(a.loss, a.lipschitz);
  const NetworkClassSpec spec = make_spec(a.depth, a.budget, a.leaf_p, a.activation);
  const bool planted = a.data_path.empty();
  csv::Writer writer(output.csv());
  writer.header({"run", "rounds", "best_round", "loss", "train_zero_one"});
  NeuralNetwork last;
  for (int r = 0; r < a.repetitions; ++r) {
    const auto run = static_cast<std::uint64_t>(r);
    const WeightedDataset data =
        planted ? planted_network(spec, a.dim, a.n, a.margin,
                                  derive_seed(common.seed, stream::kData, run), a.width)
                      .data
                : load_dataset(a.data_path, spec.input_q());
    Algorithm3Options options;
    options.t_budget = or_default(common.budget_rounds, 100);
    options.refine_budget = a.refine;
    options.seed = derive_seed(common.seed, stream::kResampledRounds, run);
    options.k_override = a.k;
    options.s_override = a.s;
    const NetworkFitResult fit =
        algorithm3(data, loss, spec, or_default(common.epsilon, 0.5), common.delta, options);
    const Vector scores = evaluate_all(fit.network, spec, data.features());
    writer.row({std::to_string(r), std::to_string(fit.rounds), std::to_string(fit.best_round),
                csv::format(fit.loss), csv::format(zero_one_risk(scores, data))});
    output.summary() << "run " << r << ": loss " << fit.loss << " (k = " << fit.config.k
                     << ", s = " << fit.config.s << ")\n";
    last = fit.network;
  }
  if (!a.network_out.empty()) {
    std::ofstream file(a.network_out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open network output file: " + a.network_out);
    file << to_json(last) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- boostnet

struct BoostArgs {
  std::string data_path;
  std::string network_out;
  int depth = 2;
  double budget = 2.0;
  double leaf_p = 2.0;
  std::string activation = "tanh";
  double gamma = 0.3;
  double margin = 0.0;  // planted margin; 0 uses gamma
  int dim = 5;
  std::size_t n = 200;
  int width = 3;
  std::string weak = "least_squares";
  std::uint64_t weak_restarts = 8;
  int weak_refine = 30;
  int weak_k = 10;
  int weak_s = 2;
  std::string weight_rule = "exponential";
};

void add_boostnet(CLI::App& app, BoostArgs& a) {
  add_network_class(app, a.depth, a.budget, a.leaf_p, a.activation);
  app.add_option("--data", a.data_path, "CSV dataset; planted network data when omitted");
  app.add_option("--network-out", a.network_out, "write the trained network as JSON");
  app.add_option("--gamma", a.gamma, "target margin gamma")->capture_default_str();
  app.add_option("--margin", a.margin, "planted margin (defaults to gamma)");
  app.add_option("--dim", a.dim, "planted data dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--n", a.n, "planted sample size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--width", a.width, "hidden width of the planted network")->capture_default_str();
  app.add_option("--weak", a.weak, "weak learner: least_squares, sphere or network")
      ->check(CLI::IsMember({"least_squares", "sphere", "network"}))
      ->capture_default_str();
  app.add_option("--weak-restarts", a.weak_restarts, "random restarts per weak learner call")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--weak-refine", a.weak_refine, "refinement steps per weak restart")->capture_default_str();
  app.add_option("--weak-k", a.weak_k, "weak learner resample size")->capture_default_str();
  app.add_option("--weak-s", a.weak_s, "weak learner hidden width (multi-layer weak learners)")
      ->capture_default_str();
  app.add_option("--weight-rule", a.weight_rule, "exponential or activated")
      ->check(CLI::IsMember({"exponential", "activated"}))
      ->capture_default_str();
}

int run_boostnet(const Common& common, const BoostArgs& a, std::ostream& out) {
  Output output(common, out);
  const NetworkClassSpec spec = make_spec(a.depth, a.budget, a.leaf_p, a.activation);
  const WeightedDataset data =
      a.data_path.empty()
          ? planted_network(spec, a.dim, a.n, a.margin > 0.0 ? a.margin : a.gamma,
                            derive_seed(common.seed, stream::kData, 0), a.width)
                .data
          : load_dataset(a.data_path, spec.input_q());
  BoostConfig config;
  config.gamma = a.gamma;
  config.delta = common.delta;
  config.rounds = common.budget_rounds;
  config.weak = {parse_weak_learner(a.weak), a.weak_restarts, a.weak_refine, a.weak_k, a.weak_s};
  config.weight_rule = parse_weight_rule(a.weight_rule);
  const BoostResult result = boostnet_train(data, spec, config, common.seed);
  write_rounds_csv(output.csv(), result.rounds);
  const MarginCertificate cert = margin_certificate(result.network, spec, data, a.gamma);
  output.summary() << "rounds " << result.rounds.size() << ", training error "
                   << result.rounds.back().train_zero_one << ", min margin " << cert.min_margin
                   << " (threshold " << cert.threshold << "), potential " << result.potential
                   << " <= " << result.potential_bound << (result.any_clamped ? " (clamped)" : "")
                   << '\n';
  if (!a.network_out.empty()) {
    std::ofstream file(a.network_out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open network output file: " + a.network_out);
    file << to_json(result.network) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------ parity

struct ParityArgs {
  ParityConfig config;
  std::uint64_t weak_restarts = 1;
  bool no_boostnet = false;
  bool no_backprop = false;
  bool no_linear = false;
  bool no_halfspace = false;
};

void add_parity(CLI::App& app, ParityArgs& a) {
  ParityConfig& c = a.config;
  app.add_option("--d", c.d, "number of +-1 coordinates")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--p", c.p, "parity degree")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--n", c.n, "total points (50/10/40 split)")->capture_default_str();
  app.add_option("--noise", c.noise, "label flip probability")->capture_default_str();
  app.add_option("--budget", c.budget, "weight budget B")->capture_default_str();
  app.add_option("--hidden", c.hidden_budget, "largest hidden unit count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--restarts", c.restarts, "independent runs per method")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--weak-k", c.weak.k, "weak learner resample size")->capture_default_str();
  app.add_option("--weak-restarts", a.weak_restarts, "random restarts per weak learner call")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--weak-refine", c.weak.refine_budget, "refinement steps per weak restart")
      ->capture_default_str();
  app.add_option("--epochs", c.backprop.epochs, "backprop epochs")->capture_default_str();
  app.add_option("--learning-rates", c.backprop.learning_rates, "backprop learning-rate grid")
      ->capture_default_str();
  app.add_option("--backprop-units", c.backprop.hidden_units, "hidden unit counts for backprop")
      ->capture_default_str();
  app.add_option("--linear-rounds", c.linear_rounds, "rounds of the halfspace baseline")->capture_default_str();
  app.add_flag("--no-boostnet", a.no_boostnet, "skip BoostNet");
  app.add_flag("--no-backprop", a.no_backprop, "skip the backprop baseline");
  app.add_flag("--no-linear", a.no_linear, "skip the least-squares linear baseline");
  app.add_flag("--no-halfspace", a.no_halfspace, "skip the random-restart halfspace baseline");
}

int run_parity(const Common& common, ParityArgs a, std::ostream& out) {
  Output output(common, out);
  ParityConfig& c = a.config;
  c.seed = common.seed;
  c.weak.t_budget = a.weak_restarts;
  c.run_boostnet = !a.no_boostnet;
  c.run_backprop = !a.no_backprop;
  c.run_linear = !a.no_linear;
  c.run_halfspace = !a.no_halfspace;
  const std::vector<ParityRow> rows = run_parity_experiment(c);
  write_parity_csv(output.csv(), rows);
  for (const auto& row : rows) {
    output.summary() << row.method << " with " << row.hidden_units
                     << " hidden units: test error " << row.test_error << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- hardness

struct HardnessArgs {
  bool verify = false;
  int instances = 100;
  int max_literals = 6;
  int max_clauses = 10;
  std::string instance_path;
  bool lifted = false;
  int grid = 21;
};

void add_hardness(CLI::App& app, HardnessArgs& a) {
  app.add_flag("--verify-identity", a.verify, "check the sign-vector identity on random instances");
  app.add_option("--instances", a.instances, "random instances to check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-literals", a.max_literals, "largest variable count")
      ->check(CLI::Range(2, kMaxBruteForceVariables))
      ->capture_default_str();
  app.add_option("--max-clauses", a.max_clauses, "largest clause count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--instance", a.instance_path, "solve one instance file exactly");
  app.add_flag("--lifted-check", a.lifted, "grid-check the lifted instance of --instance");
  app.add_option("--grid", a.grid, "grid points per axis for --lifted-check")->capture_default_str();
}

int run_hardness(const Common& common, const HardnessArgs& a, std::ostream& out) {
  if (!a.verify && a.instance_path.empty()) {
    throw CLI::ValidationError("hardness", "give --verify-identity or --instance");
  }
  // Verdict lines always go to stdout; CSV only when --out is given.
  std::unique_ptr<std::ofstream> file;
  std::ostringstream discard;
  if (!common.out_path.empty()) {
    file = std::make_unique<std::ofstream>(common.out_path, std::ios::binary);
    if (!*file) throw std::runtime_error("cannot open output file: " + common.out_path);
  }
  csv::Writer writer(file ? static_cast<std::ostream&>(*file) : discard);
  std::ostream& summary = out;
  bool all_ok = true;
  if (a.verify) {
    writer.header({"instance", "n_literals", "clauses", "sign_vectors", "max_abs_error", "max_satisfied"});
    for (int t = 0; t < a.instances; ++t) {
      Rng rng(derive_seed(common.seed, stream::kHardness, static_cast<std::uint64_t>(t)));
      std::uniform_int_distribution<int> lit(2, a.max_literals);
      std::uniform_int_distribution<int> cl(1, a.max_clauses);
      const int n = lit(rng);
      const int d = cl(rng);
      const Max2SatInstance inst = random_instance(n, d, rng);
      const std::uint64_t patterns = std::uint64_t{1} << (n + 1);
      double worst = 0.0;
      int best = 0;
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        std::vector<int> alpha(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) alpha[static_cast<std::size_t>(i)] = ((mask >> i) & 1U) ? -1 : 1;
        const IdentityCheck check = verify_identity(inst, alpha);
        worst = std::max(worst, std::abs(check.lhs - check.rhs));
        best = std::max(best, check.satisfied);
      }
      const bool ok = worst <= 1e-9 && best == brute_force_max_sat(inst).satisfied;
      all_ok = all_ok && ok;
      summary << (ok ? "PASS" : "FAIL") << " instance " << t + 1 << " n=" << n
                       << " d=" << d << " sign_vectors=" << patterns << '\n';
      writer.row({std::to_string(t + 1), std::to_string(n), std::to_string(d), std::to_string(patterns),
                  csv::format(worst), std::to_string(best)});
    }
  } else {
    std::ifstream in(a.instance_path);
    if (!in) throw std::runtime_error("cannot open instance file: " + a.instance_path);
    const Max2SatInstance inst = read_instance(in);
    const MaxSatSolution sol = brute_force_max_sat(inst);
    const Matrix x = instance_to_vectors(inst);
    const double minimum = reduction_minimum(x);
    const double scaled = minimum * 2.0 * (inst.n_literals + 1);
    const double recovered = inst.clause_count() / 8.0 * (scaled * scaled - 1.0);
    const bool ok = std::abs(recovered - sol.satisfied) <= 1e-6;
    all_ok = ok;
    writer.header({"n_literals", "clauses", "max_satisfied", "reduction_minimum", "recovered"});
    writer.row({std::to_string(inst.n_literals), std::to_string(inst.clause_count()),
                std::to_string(sol.satisfied), csv::format(minimum), csv::format(recovered)});
    summary << (ok ? "PASS" : "FAIL") << " max satisfied " << sol.satisfied
                     << ", recovered from the reduction " << recovered << '\n';
    if (a.lifted) {
      const LiftedInstance lifted(paired_points(x));
      const ApproximationCheck check = grid_rounding_check(lifted, a.grid);
      summary << (check.holds || !check.applicable ? "PASS" : "FAIL")
                       << " lifted grid: epsilon " << check.epsilon << ", g(rounded) "
                       << check.g_rounded << ", g* " << check.g_star << '\n';
      all_ok = all_ok && (check.holds || !check.applicable);
    }
  }
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- analysis

struct AnalysisArgs {
  std::string check = "rademacher";
  std::size_t k = 100;
  std::size_t trials = 1000;
  int candidates = 200;
  int depth = 2;
  double budget = 1.0;
  double leaf_p = 2.0;
  int dim = 10;
  int points = 10;
  std::vector<int> sizes{4, 16};
  int width = 3;
};

void add_analysis(CLI::App& app, AnalysisArgs& a) {
  app.add_option("--check", a.check, "rademacher, gap, jl or maurey")
      ->check(CLI::IsMember({"rademacher", "gap", "jl", "maurey"}))
      ->capture_default_str();
  app.add_option("--k", a.k, "batch size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--trials", a.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--candidates", a.candidates, "random candidate functions")->capture_default_str();
  app.add_option("--depth", a.depth, "candidate network depth (1 = linear)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--budget", a.budget, "weight budget B")->capture_default_str();
  app.add_option("--leaf-p", a.leaf_p, "leaf norm exponent p")->capture_default_str();
  app.add_option("--dim", a.dim, "ambient dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--points", a.points, "points (jl) or atoms (maurey)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--sizes", a.sizes, "sparsity levels s for maurey")->capture_default_str();
  app.add_option("--width", a.width, "hidden width of random candidate networks")->capture_default_str();
}

// Uniform points on the unit l_q sphere scaled into the ball.
Matrix random_ball_points(Rng& rng, int count, int dim, double q) {
  Matrix x(count, dim);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    Vector g = gaussian_vector(rng, dim);
    g /= lp_norm(g, q);
    x.row(i) = (radius(rng) * g).transpose();
  }
  return x;
}

int run_analysis(const Common& common, const AnalysisArgs& a, std::ostream& out) {
  Output output(common, out);
  csv::Writer writer(output.csv());
  writer.header({"check", "parameter", "value", "std_error", "bound", "pass"});
  Rng rng(derive_seed(common.seed, stream::kAnalysis, 1U << 30));
  bool all_ok = true;
  auto emit = [&](const std::string& check, const std::string& param, double value, double se,
                  double bound, bool pass) {
    all_ok = all_ok && pass;
    writer.row({check, param, csv::format(value), csv::format(se), csv::format(bound), pass ? "1" : "0"});
    output.summary() << (pass ? "PASS " : "FAIL ") << check << ' ' << param << ": " << value
                     << " (stderr " << se << ", bound " << bound << ")\n";
  };

  if (a.check == "rademacher" || a.check == "gap") {
    const NetworkClassSpec spec = make_spec(a.depth, a.budget, a.leaf_p, "tanh");
    const double q = spec.input_q();
    std::vector<NeuralNetwork> nets;
    for (int c = 0; c < a.candidates; ++c) nets.push_back(random_network(spec, a.dim, a.width, rng));
    std::vector<Predictor> candidates;
    for (const auto& net : nets) {
      candidates.push_back([&net, spec](const Vector& x) { return evaluate(net, spec, x); });
    }
    if (a.check == "rademacher") {
      const Matrix batch = random_ball_points(rng, static_cast<int>(a.k), a.dim, q);
      const RademacherEstimate est = rademacher_estimate(candidates, batch, a.trials, common.seed);
      const double bound = std::sqrt(q / static_cast<double>(a.k)) * std::pow(a.budget, a.depth);
      emit("rademacher", "k=" + std::to_string(a.k), est.value, est.std_error, bound,
           est.value <= bound + 3.0 * est.std_error);
    } else {
      const Matrix x = random_ball_points(rng, 500, a.dim, q);
      Vector y(x.rows());
      std::bernoulli_distribution coin(0.5);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = coin(rng) ? 1.0 : -1.0;
      const WeightedDataset data = WeightedDataset::uniform(x, y, q);
      const GeneralizationGap gap = generalization_gap_check(
          candidates, LossFunction::piecewise_linear(1.0), data, a.k, a.trials, common.seed);
      emit("gap", "k=" + std::to_string(a.k), gap.mean_gap, gap.gap_std_error, gap.bound,
           gap.within_bound());
    }
  } else if (a.check == "jl") {
    const Matrix points = random_ball_points(rng, a.points, a.dim, 2.0);
    const double epsilon = or_default(common.epsilon, 0.4);
    const JlCheck jl = jl_distortion_check(points, epsilon, a.trials, common.seed);
    const double floor = 1.0 / a.points;
    emit("jl", "s=" + std::to_string(jl.s), jl.frequency, jl.std_error, floor,
         jl.frequency >= floor - 3.0 * jl.std_error);
  } else {
    const Matrix atoms = random_ball_points(rng, a.points, a.dim, 2.0);
    Vector w(a.points);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = unit(rng);
    w /= w.sum();
    for (int s : a.sizes) {
      const MaureyCheck m = maurey_sparsify(atoms, w, 1.0, s, a.trials, common.seed);
      emit("maurey", "s=" + std::to_string(s), m.mean_squared_error, m.std_error, m.bound,
           m.within_bound());
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-convex empirical risk minimization experiments", "ncerm"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.add_option("--seed", common.seed, "master seed")->capture_default_str();
  app.add_option("--out", common.out_path, "CSV output path (stdout when omitted)");
  app.add_option("--budget-rounds", common.budget_rounds, "cap on random restarts or boosting rounds");
  app.add_option("--epsilon", common.epsilon, "target excess risk epsilon");
  app.add_option("--delta", common.delta, "failure probability delta")->capture_default_str();

  HalfspaceArgs halfspace;
  NetworkArgs nn;
  BoostArgs boost;
  ParityArgs parity;
  HardnessArgs hardness;
  AnalysisArgs analysis;
  CLI::App* sub_halfspace = app.add_subcommand("halfspace", "learn a halfspace by random restarts");
  CLI::App* sub_nn = app.add_subcommand("nn", "learn a multi-layer network by random restarts");
  CLI::App* sub_boost = app.add_subcommand("boostnet", "build a network by boosting");
  CLI::App* sub_parity = app.add_subcommand("parity", "noisy parity experiment");
  CLI::App* sub_hardness = app.add_subcommand("hardness", "MAX-2-SAT reduction checks");
  CLI::App* sub_analysis = app.add_subcommand("analysis", "Monte-Carlo checks of the supporting bounds");
  add_halfspace(*sub_halfspace, halfspace);
  add_nn(*sub_nn, nn);
  add_boostnet(*sub_boost, boost);
  add_parity(*sub_parity, parity);
  add_hardness(*sub_hardness, hardness);
  add_analysis(*sub_analysis, analysis);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_halfspace->parsed()) return run_halfspace(common, halfspace, out);
    if (sub_nn->parsed()) return run_nn(common, nn, out);
    if (sub_boost->parsed()) return run_boostnet(common, boost, out);
    if (sub_parity->parsed()) return run_parity(common, parity, out);
    if (sub_hardness->parsed()) return run_hardness(common, hardness, out);
    if (sub_analysis->parsed()) return run_analysis(common, analysis, out);
  } catch (const CLI::ParseError& e) {
    err << "ncerm: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "ncerm: invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ncerm: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ncerm
