// ssglm command line: fit, debias, test, simulate.
//
// A JSON config file supplies the run description; the common flags
// (--data, --response, --intercept, --seed, --workers, --out) override the
// file. Coordinates in configs and reports are 1-based positions in the full
// coefficient vector, so with an intercept the intercept is coordinate 1.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "ssglm/csv.hpp"
#include "ssglm/report_io.hpp"
#include "ssglm/simulate.hpp"

using namespace ssglm;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string command;
  std::string data_path;
  std::string response = "y";
  bool intercept = false;
  LossKind loss = LossKind::Logistic;

  // norm
  NormSpec::Kind norm_kind = NormSpec::Kind::L1;
  std::vector<std::vector<int>> groups;  // 1-based over penalized coordinates
  NormSpec::Kind weak_kind = NormSpec::Kind::L1;

  // lambda: fixed value or split rule
  std::optional<double> lambda;
  double split_base = 0.3;
  int split_length = 25;

  // nodewise
  std::vector<int> nodewise_rows;  // 1-based full-vector coordinates
  int nodewise_folds = 5;
  int nodewise_grid_length = 20;
  double nodewise_grid_decades = 3.0;
  std::optional<double> nodewise_lambda;
  double tau_floor = 1e-8;

  // inference
  std::vector<int> restriction_coordinates;  // 1-based
  Vector restriction_values;
  bool restriction_intersection = false;
  double delta = 0.05;
  std::vector<int> ci_coordinates;  // 1-based, intervals to report

  std::uint64_t seed = 1;
  int workers = 0;
  std::string out_path;

  SimConfig sim;
};

class ConfigReader {
 public:
  explicit ConfigReader(const json& j) : root_(j) {}

  template <typename T>
  void read(const char* key, T& into) {
    if (!root_.contains(key)) return;
    try {
      into = root_.at(key).get<T>();
    } catch (const json::exception&) {
      errors.push_back(std::string("field '") + key + "' has the wrong type");
    }
  }

  const json* section(const char* key) {
    if (!root_.contains(key)) return nullptr;
    if (!root_.at(key).is_object()) {
      errors.push_back(std::string("field '") + key + "' must be an object");
      return nullptr;
    }
    return &root_.at(key);
  }

  std::vector<std::string> errors;

 private:
  const json& root_;
};

void parse_norm(const json& j, RunConfig& cfg, std::vector<std::string>& errors) {
  const std::string kind = j.value("kind", "l1");
  if (kind == "l1") {
    cfg.norm_kind = NormSpec::Kind::L1;
  } else if (kind == "group") {
    cfg.norm_kind = NormSpec::Kind::WeightedGroupLasso;
    if (!j.contains("groups")) {
      errors.push_back("norm.groups is required for the group norm");
    } else {
      try {
        cfg.groups = j.at("groups").get<std::vector<std::vector<int>>>();
      } catch (const json::exception&) {
        errors.push_back("norm.groups must be a list of integer lists");
      }
    }
  } else {
    errors.push_back("norm.kind must be 'l1' or 'group'");
  }
  const std::string weak = j.value("weak", "l1");
  if (weak == "l1")
    cfg.weak_kind = NormSpec::Kind::L1;
  else if (weak == "group")
    cfg.weak_kind = NormSpec::Kind::WeightedGroupLasso;
  else
    errors.push_back("norm.weak must be 'l1' or 'group'");
}

void parse_simulate(const json& j, RunConfig& cfg, std::vector<std::string>& errors) {
  const std::string setup = j.value("setup", "five_groups");
  if (setup == "five_groups")
    cfg.sim.setup = SimSetup::FiveGroups;
  else if (setup == "ten_groups")
    cfg.sim.setup = SimSetup::TenGroups;
  else
    errors.push_back("simulate.setup must be 'five_groups' or 'ten_groups'");
  ConfigReader reader(j);
  reader.read("n", cfg.sim.n);
  reader.read("p", cfg.sim.p);
  reader.read("rho", cfg.sim.rho);
  reader.read("iterations", cfg.sim.iterations);
  reader.read("grid_base", cfg.sim.grid_base);
  reader.read("grid_length", cfg.sim.grid_len);
  reader.read("nominal_level", cfg.sim.nominal_level);
  reader.read("nodewise_folds", cfg.sim.nodewise_folds);
  for (auto& e : reader.errors) errors.push_back("simulate." + e);
}

RunConfig load_config(const std::string& path, const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  std::vector<std::string> errors;

  json j;
  if (!path.empty()) {
    std::string text;
    try {
      text = io::read_file(path);
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("config: not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
  } else {
    j = json::object();
  }

  ConfigReader reader(j);
  reader.read("data", cfg.data_path);
  reader.read("response", cfg.response);
  reader.read("intercept", cfg.intercept);
  reader.read("delta", cfg.delta);
  reader.read("seed", cfg.seed);
  reader.read("workers", cfg.workers);
  reader.read("out", cfg.out_path);
  std::string loss = "logistic";
  reader.read("loss", loss);
  if (loss == "logistic")
    cfg.loss = LossKind::Logistic;
  else if (loss == "gaussian")
    cfg.loss = LossKind::Gaussian;
  else
    reader.errors.push_back("loss must be 'logistic' or 'gaussian'");

  if (j.contains("lambda")) {
    double lam = 0.0;
    reader.read("lambda", lam);
    cfg.lambda = lam;
  }
  if (const json* rule = reader.section("lambda_rule")) {
    ConfigReader rr(*rule);
    rr.read("base", cfg.split_base);
    rr.read("length", cfg.split_length);
    for (auto& e : rr.errors) reader.errors.push_back("lambda_rule." + e);
  }
  if (const json* norm = reader.section("norm")) parse_norm(*norm, cfg, reader.errors);
  if (const json* nw = reader.section("nodewise")) {
    ConfigReader nr(*nw);
    nr.read("rows", cfg.nodewise_rows);
    nr.read("folds", cfg.nodewise_folds);
    nr.read("grid_length", cfg.nodewise_grid_length);
    nr.read("grid_decades", cfg.nodewise_grid_decades);
    nr.read("tau_floor", cfg.tau_floor);
    if (nw->contains("lambda")) {
      double lam = 0.0;
      nr.read("lambda", lam);
      cfg.nodewise_lambda = lam;
    }
    for (auto& e : nr.errors) reader.errors.push_back("nodewise." + e);
  }
  if (const json* restriction = reader.section("restriction")) {
    ConfigReader rr(*restriction);
    rr.read("coordinates", cfg.restriction_coordinates);
    rr.read("values", cfg.restriction_values);
    std::string type = "direction";
    rr.read("type", type);
    if (type == "intersection")
      cfg.restriction_intersection = true;
    else if (type != "direction")
      rr.errors.push_back("type must be 'direction' or 'intersection'");
    for (auto& e : rr.errors) reader.errors.push_back("restriction." + e);
  }
  reader.read("coordinates", cfg.ci_coordinates);
  if (const json* sim = reader.section("simulate")) parse_simulate(*sim, cfg, reader.errors);

  if (!reader.errors.empty()) {
    std::string all = "invalid config:";
    for (const auto& e : reader.errors) all += "\n  - " + e;
    throw ConfigError(all);
  }
  return cfg;
}

// every structural problem reported at once, then exit 2
void validate(const RunConfig& cfg) {
  std::vector<std::string> errors;
  const bool needs_data = cfg.command != "simulate";
  if (needs_data && cfg.data_path.empty()) errors.push_back("data: no input CSV given");
  if (needs_data && !cfg.data_path.empty() && !std::filesystem::exists(cfg.data_path))
    errors.push_back("data: file '" + cfg.data_path + "' does not exist");
  if (cfg.out_path.empty()) errors.push_back("out: no output path given");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) errors.push_back("delta must be in (0,1)");
  if (cfg.lambda && *cfg.lambda < 0.0) errors.push_back("lambda must be nonnegative");
  if (!(cfg.split_base > 0.0 && cfg.split_base < 1.0))
    errors.push_back("lambda_rule.base must be in (0,1)");
  if (cfg.split_length < 1) errors.push_back("lambda_rule.length must be positive");
  if (cfg.nodewise_folds < 2) errors.push_back("nodewise.folds must be >= 2");
  if (cfg.nodewise_grid_length < 1) errors.push_back("nodewise.grid_length must be positive");
  if (cfg.nodewise_grid_decades <= 0.0) errors.push_back("nodewise.grid_decades must be positive");
  if (cfg.tau_floor <= 0.0) errors.push_back("nodewise.tau_floor must be positive");
  if (cfg.nodewise_lambda && *cfg.nodewise_lambda < 0.0)
    errors.push_back("nodewise.lambda must be nonnegative");
  if (cfg.workers < 0) errors.push_back("workers must be nonnegative");
  if (cfg.restriction_coordinates.size() != cfg.restriction_values.size())
    errors.push_back("restriction.values must match restriction.coordinates");
  for (int c : cfg.restriction_coordinates)
    if (c < 1) errors.push_back("restriction coordinates are 1-based and must be positive");
  for (int c : cfg.ci_coordinates)
    if (c < 1) errors.push_back("coordinates are 1-based and must be positive");
  for (int c : cfg.nodewise_rows)
    if (c < 1) errors.push_back("nodewise rows are 1-based and must be positive");
  if (cfg.command == "test" && cfg.restriction_coordinates.empty())
    errors.push_back("test: a restriction with coordinates is required");
  if (cfg.restriction_intersection && cfg.restriction_coordinates.size() != 2)
    errors.push_back("restriction: the intersection test takes exactly two coordinates");
  if (cfg.command == "simulate") {
    try {
      cfg.sim.validate();
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string all = "invalid config:";
    for (const auto& e : errors) all += "\n  - " + e;
    throw ConfigError(all);
  }
}

NormSpec build_norm_spec(const RunConfig& cfg, std::size_t penalized_count) {
  if (cfg.norm_kind == NormSpec::Kind::L1)
    return NormSpec::l1(static_cast<int>(penalized_count));
  std::vector<std::vector<int>> zero_based;
  for (const auto& group : cfg.groups) {
    std::vector<int> g;
    for (int idx : group) {
      if (idx < 1 || static_cast<std::size_t>(idx) > penalized_count)
        throw ConfigError("norm.groups: index " + std::to_string(idx) +
                          " outside 1.." + std::to_string(penalized_count));
      g.push_back(idx - 1);
    }
    zero_based.push_back(std::move(g));
  }
  try {
    NormSpec spec = NormSpec::weighted_group_lasso(
        GroupPartition::from_groups(std::move(zero_based), static_cast<int>(penalized_count)));
    return spec.with_weak_kind(cfg.weak_kind);
  } catch (const InputError& e) {
    throw ConfigError(std::string("norm.groups: ") + e.what());
  }
}

double resolve_lambda(const RunConfig& cfg, const Dataset& data, const NormSpec& spec) {
  if (cfg.lambda) return *cfg.lambda;
  const double lmax = lambda_max(data, cfg.loss, spec);
  const auto grid = lambda_grid(lmax, cfg.split_base, cfg.split_length);
  return select_lambda_split(data, cfg.loss, spec, grid, {});
}

std::vector<int> to_zero_based(const std::vector<int>& coords, std::size_t p, const char* what) {
  std::vector<int> out;
  for (int c : coords) {
    if (c < 1 || static_cast<std::size_t>(c) > p)
      throw ConfigError(std::string(what) + ": coordinate " + std::to_string(c) +
                        " outside 1.." + std::to_string(p));
    out.push_back(c - 1);
  }
  return out;
}

int run_fit(const RunConfig& cfg) {
  const Dataset data = ingest_csv(cfg.data_path, cfg.response, cfg.intercept);
  const NormSpec spec = build_norm_spec(cfg, data.penalized_count());
  const double lambda = resolve_lambda(cfg, data, spec);
  const FitResult result = fit(data, cfg.loss, spec, lambda);
  io::write_file(cfg.out_path, io::fit_result_json(result));
  std::printf("fit: lambda=%s objective=%s converged=%s -> %s\n",
              io::format_double(result.lambda).c_str(),
              io::format_double(result.objective).c_str(), result.converged ? "yes" : "no",
              cfg.out_path.c_str());
  return 0;
}

io::InferenceReport run_inference_pipeline(const RunConfig& cfg, bool with_test) {
  const Dataset data = ingest_csv(cfg.data_path, cfg.response, cfg.intercept);
  const NormSpec spec = build_norm_spec(cfg, data.penalized_count());
  const double lambda = resolve_lambda(cfg, data, spec);
  const FitResult fitted = fit(data, cfg.loss, spec, lambda);

  const std::vector<int> restriction =
      to_zero_based(cfg.restriction_coordinates, data.p(), "restriction");
  std::vector<int> wanted = to_zero_based(cfg.ci_coordinates, data.p(), "coordinates");
  if (!cfg.nodewise_rows.empty()) {
    const auto extra = to_zero_based(cfg.nodewise_rows, data.p(), "nodewise.rows");
    wanted.insert(wanted.end(), extra.begin(), extra.end());
  }
  wanted.insert(wanted.end(), restriction.begin(), restriction.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  if (wanted.empty()) throw ConfigError("no coordinates requested for inference");

  NodewiseConfig nw;
  nw.target_rows = wanted;
  nw.weak_kind = cfg.weak_kind;
  nw.fixed_lambda = cfg.nodewise_lambda;
  nw.folds = cfg.nodewise_folds;
  nw.grid_len = cfg.nodewise_grid_length;
  nw.grid_decades = cfg.nodewise_grid_decades;
  nw.tau_floor = cfg.tau_floor;
  nw.seed = cfg.seed;
  const GroupPartition* partition =
      spec.kind() == NormSpec::Kind::WeightedGroupLasso ? &spec.partition() : nullptr;
  const PrecisionEstimate theta =
      estimate_precision(data, cfg.loss, fitted.beta, nw, partition);

  const DebiasResult debiased = debias(fitted.beta, theta, data, cfg.loss);

  io::InferenceReport report;
  report.n = data.n();
  report.delta = cfg.delta;
  for (int j : wanted) {
    io::CoordinateReport c;
    c.coordinate = j + 1;
    c.b = debiased.at(j);
    c.sigma = coordinate_sigma(j, theta, data, cfg.loss, fitted.beta);
    c.interval = confidence_interval(c.b, c.sigma, data.n(), cfg.delta);
    report.coordinates.push_back(c);
  }
  if (with_test) {
    report.has_test = true;
    report.test_coordinates = cfg.restriction_coordinates;
    if (cfg.restriction_intersection) {
      const PairTestResult pair =
          intersection_test(restriction[0], restriction[1], cfg.restriction_values[0],
                            cfg.restriction_values[1], debiased, theta, data, cfg.loss,
                            fitted.beta, cfg.delta);
      report.intersection = true;
      report.z1 = pair.z1;
      report.z2 = pair.z2;
      report.correlation = pair.correlation;
      report.critical = pair.critical;
      report.z = pair.statistic;
      report.p_value = pair.p_value;
    } else {
      const RestrictionSpec rest =
          RestrictionSpec::equal_weight(restriction, cfg.restriction_values, data.p());
      const double v = variance_alpha(rest, theta, data, cfg.loss, fitted.beta);
      const WaldResult wald = wald_test(rest, debiased, v, data.n());
      report.null_value = rest.null_value;
      report.v_alpha = v;
      report.z = wald.z;
      report.p_value = wald.p_value;
    }
  }
  return report;
}

int run_debias(const RunConfig& cfg) {
  const io::InferenceReport report = run_inference_pipeline(cfg, false);
  io::write_file(cfg.out_path, io::inference_report_json(report));
  std::printf("debias: %zu coordinates -> %s\n", report.coordinates.size(), cfg.out_path.c_str());
  return 0;
}

int run_test(const RunConfig& cfg) {
  const io::InferenceReport report = run_inference_pipeline(cfg, true);
  io::write_file(cfg.out_path, io::inference_report_json(report));
  std::printf("test: z=%s p=%s -> %s\n", io::format_double(report.z).c_str(),
              io::format_double(report.p_value).c_str(), cfg.out_path.c_str());
  return 0;
}

std::string table_path(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".txt";
  return out + ".txt";
}

int run_simulate(RunConfig cfg) {
  cfg.sim.seed = cfg.seed;
  cfg.sim.workers = cfg.workers;
  const SimReport report = run_campaign(cfg.sim);
  io::write_file(cfg.out_path, io::sim_report_json(cfg.sim, report));
  const std::string table = io::sim_report_table(cfg.sim, report);
  io::write_file(table_path(cfg.out_path), table);
  std::fputs(table.c_str(), stdout);
  std::printf("simulate: %d ok, %d failed, %.1fs -> %s\n", report.successes, report.failures,
              report.runtime_seconds, cfg.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized GLMs with structured sparsity, debiased inference, and the Monte Carlo harness"};
  app.require_subcommand(1);

  std::string config_path, data_path, response, out_path;
  bool intercept = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--data", data_path, "input CSV (overrides config)");
    cmd->add_option("--response", response, "response column name (overrides config)");
    cmd->add_flag("--intercept", intercept, "prepend an unpenalized intercept column");
    cmd->add_option("--seed", seed, "RNG seed (overrides config)");
    cmd->add_option("--workers", workers, "worker threads for parallel stages");
    cmd->add_option("--out", out_path, "output file (overrides config)");
  };
  add_common(app.add_subcommand("fit", "penalized GLM fit"));
  add_common(app.add_subcommand("debias", "debiased coefficients with intervals"));
  add_common(app.add_subcommand("test", "Wald test of a linear restriction"));
  add_common(app.add_subcommand("simulate", "size/power/coverage Monte Carlo"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = load_config(config_path, command);
    if (!data_path.empty()) cfg.data_path = data_path;
    if (!response.empty()) cfg.response = response;
    if (intercept) cfg.intercept = true;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (!out_path.empty()) cfg.out_path = out_path;
    validate(cfg);

    if (command == "fit") return run_fit(cfg);
    if (command == "debias") return run_debias(cfg);
    if (command == "test") return run_test(cfg);
    return run_simulate(std::move(cfg));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  }
}
