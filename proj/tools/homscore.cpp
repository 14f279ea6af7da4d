// homscore: score tests of homogeneity (all variance components zero) for
// clustered data, with multiplier-resampling p-values, plus a Monte Carlo
// harness for size/power studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>

#include "homscore/errors.hpp"
#include "homscore/io.hpp"
#include "homscore/report.hpp"
#include "homscore/simharness.hpp"

namespace {

using homscore::ConfigError;

homscore::GridSpec parse_grid(const std::string& text) {
  homscore::GridSpec g;
  int n1 = 0, n2 = 0;
  double d = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%lf%c", &n1, &n2, &d, &tail) != 3)
    throw ConfigError("--grid expects n1,n2,delta0 (e.g. 20,31,0.9375)");
  g.n1 = n1;
  g.n2 = n2;
  g.delta0 = d;
  return g;
}

// Flat-key JSON config; command-line flags override file values.
class ConfigFile {
public:
  explicit ConfigFile(const std::string& path) {
    try {
      json_ = nlohmann::json::parse(homscore::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config '" + path + "': " + e.what());
    }
    if (!json_.is_object()) throw ConfigError("config '" + path + "' must be a JSON object");
  }

  template <typename T>
  void apply(const char* key, std::optional<T>& slot) {
    known_.insert(key);
    if (slot.has_value()) return;  // flag wins
    auto it = json_.find(key);
    if (it == json_.end()) return;
    try {
      slot = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  }

  void reject_unknown() const {
    for (auto it = json_.begin(); it != json_.end(); ++it)
      if (known_.find(it.key()) == known_.end())
        throw ConfigError("unknown config key '" + it.key() + "'");
  }

private:
  nlohmann::json json_;
  std::set<std::string> known_;
};

template <typename T>
T require(const std::optional<T>& slot, const char* what) {
  if (!slot.has_value()) throw ConfigError(std::string(what) + " is required");
  return *slot;
}

struct TestArgs {
  std::optional<std::string> data, family, config, grid, out;
  std::optional<int> trials, r0, threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
};

int run_test_command(const TestArgs& raw) {
  TestArgs a = raw;
  if (a.config) {
    ConfigFile cfg(*a.config);
    cfg.apply("data", a.data);
    cfg.apply("family", a.family);
    cfg.apply("trials", a.trials);
    cfg.apply("r0", a.r0);
    cfg.apply("seed", a.seed);
    cfg.apply("grid", a.grid);
    cfg.apply("alpha", a.alpha);
    cfg.apply("threads", a.threads);
    cfg.apply("out", a.out);
    cfg.reject_unknown();
  }

  const std::string data_path = require(a.data, "--data");
  const std::string family_name = require(a.family, "--family");
  const std::uint64_t seed = require(a.seed, "--seed");
  const homscore::GridSpec grid = parse_grid(a.grid.value_or("20,31,0.9375"));
  const int r0 = a.r0.value_or(1000);
  const double alpha = a.alpha.value_or(0.05);
  const int threads = a.threads.value_or(0);
  const std::string out = a.out.value_or("report.json");

  const homscore::FamilySpec family =
      homscore::family_from_name(family_name, a.trials.value_or(1));
  const homscore::Dataset data = homscore::load_dataset(data_path);
  const homscore::TestReport report =
      homscore::run_test(data, family, grid, r0, seed, alpha, threads);
  homscore::write_report(out, report);

  std::printf("n=%d N=%lld family=%s\n", report.n, report.n_total, report.family.c_str());
  std::printf("s_o=%.6g (p=%.6g)  s_p=%.6g (p=%.6g)  s_s=%.6g (p=%.6g)\n", report.s_o,
              report.p_o, report.s_p, report.p_p, report.s_s, report.p_s);
  std::printf("report written to %s\n", out.c_str());
  return 0;
}

struct SimArgs {
  std::optional<std::string> model, response, mode, grid, config, out;
  std::optional<int> trials, n, m, reps, r0, threads;
  std::optional<double> sigma1_sq, rho1, rho2, sigma2_sq, phi, alpha;
  std::optional<std::uint64_t> seed;
};

int run_sim_command(const SimArgs& raw) {
  SimArgs a = raw;
  if (a.config) {
    ConfigFile cfg(*a.config);
    cfg.apply("model", a.model);
    cfg.apply("response", a.response);
    cfg.apply("trials", a.trials);
    cfg.apply("n", a.n);
    cfg.apply("m", a.m);
    cfg.apply("sigma1_sq", a.sigma1_sq);
    cfg.apply("rho1", a.rho1);
    cfg.apply("rho2", a.rho2);
    cfg.apply("sigma2_sq", a.sigma2_sq);
    cfg.apply("phi", a.phi);
    cfg.apply("reps", a.reps);
    cfg.apply("r0", a.r0);
    cfg.apply("alpha", a.alpha);
    cfg.apply("seed", a.seed);
    cfg.apply("mode", a.mode);
    cfg.apply("grid", a.grid);
    cfg.apply("threads", a.threads);
    cfg.apply("out", a.out);
    cfg.reject_unknown();
  }

  homscore::SimConfig cfg;
  const std::string model = require(a.model, "--model");
  if (model == "logistic") cfg.model = homscore::SimModel::logistic;
  else if (model == "linear") cfg.model = homscore::SimModel::linear;
  else throw ConfigError("--model must be logistic or linear");

  const std::string response = a.response.value_or("bernoulli");
  if (response == "bernoulli") cfg.response = homscore::SimResponse::bernoulli;
  else if (response == "binomial") cfg.response = homscore::SimResponse::binomial;
  else throw ConfigError("--response must be bernoulli or binomial");

  const std::string mode = a.mode.value_or("considered");
  if (mode == "considered") cfg.mode = homscore::CorrelationMode::considered;
  else if (mode == "ignored") cfg.mode = homscore::CorrelationMode::ignored;
  else throw ConfigError("--mode must be considered or ignored");

  cfg.trials = a.trials.value_or(5);
  cfg.n = require(a.n, "--n");
  cfg.m = require(a.m, "--m");
  cfg.sigma1_sq = a.sigma1_sq.value_or(0.0);
  cfg.rho1 = a.rho1.value_or(0.5);
  cfg.rho2 = a.rho2.value_or(1.0);
  cfg.sigma2_sq = a.sigma2_sq.value_or(0.0);
  cfg.phi = a.phi.value_or(1.0);
  cfg.reps = a.reps.value_or(300);
  cfg.r0 = a.r0.value_or(200);
  cfg.alpha = a.alpha.value_or(0.05);
  cfg.seed = require(a.seed, "--seed");
  cfg.grid = parse_grid(a.grid.value_or("10,7,0.9375"));
  cfg.threads = a.threads.value_or(0);
  cfg.validate();

  const long long budget = static_cast<long long>(cfg.reps) * cfg.r0 *
                           cfg.grid.n1 * (cfg.mode == homscore::CorrelationMode::ignored ? 1 : cfg.grid.n2);
  if (budget > 2'000'000'000LL)
    std::fprintf(stderr, "warning: this configuration is large and may run for a long time\n");

  const homscore::RateTable table = homscore::estimate_rates(cfg);
  const std::string out = a.out.value_or("rates.csv");
  homscore::write_rate_table(out, table);

  for (const auto& row : table.rows)
    std::printf("%s %s=%.4g mode=%s  %s: rate=%.4f se=%.4f reps=%d\n", row.model.c_str(),
                row.param.c_str(), row.value, row.mode.c_str(), row.statistic.c_str(), row.rate,
                row.se, row.reps);
  if (table.excluded > 0)
    std::printf("excluded replications (fit failures): %d\n", table.excluded);
  std::printf("rates written to %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"score tests of homogeneity for clustered data"};
  app.require_subcommand(1);

  TestArgs test_args;
  CLI::App* test = app.add_subcommand("test", "run the homogeneity test on a CSV dataset");
  test->add_option("--data", test_args.data, "input CSV (cluster,y,x1..xp,z1..zq[,trials])");
  test->add_option("--family", test_args.family, "gaussian, bernoulli or binomial");
  test->add_option("--trials", test_args.trials, "default binomial trials");
  test->add_option("--config", test_args.config, "JSON config with flat keys mirroring flags");
  test->add_option("--r0", test_args.r0, "resampling replicates (default 1000)");
  test->add_option("--seed", test_args.seed, "RNG seed (required; no wall-clock seeding)");
  test->add_option("--grid", test_args.grid, "nuisance grid n1,n2,delta0 (default 20,31,0.9375)");
  test->add_option("--alpha", test_args.alpha, "significance level (default 0.05)");
  test->add_option("--threads", test_args.threads, "worker threads (default: all cores)");
  test->add_option("--out", test_args.out, "output report path (default report.json)");

  SimArgs sim_args;
  CLI::App* sim = app.add_subcommand("sim", "Monte Carlo size/power study");
  sim->add_option("--model", sim_args.model, "logistic or linear");
  sim->add_option("--response", sim_args.response, "bernoulli or binomial (logistic model)");
  sim->add_option("--trials", sim_args.trials, "binomial trials (default 5)");
  sim->add_option("--n", sim_args.n, "clusters per dataset");
  sim->add_option("--m", sim_args.m, "observations per cluster");
  sim->add_option("--sigma1-sq", sim_args.sigma1_sq, "random-effect variance (default 0)");
  sim->add_option("--rho1", sim_args.rho1, "random-effect correlation (default 0.5)");
  sim->add_option("--rho2", sim_args.rho2, "second-component variance ratio (default 1.0)");
  sim->add_option("--sigma2-sq", sim_args.sigma2_sq, "overdispersion perturbation scale (default 0)");
  sim->add_option("--phi", sim_args.phi, "linear-model noise variance (default 1)");
  sim->add_option("--reps", sim_args.reps, "Monte Carlo replications (default 300)");
  sim->add_option("--r0", sim_args.r0, "resamples per replication (default 200)");
  sim->add_option("--alpha", sim_args.alpha, "significance level (default 0.05)");
  sim->add_option("--seed", sim_args.seed, "RNG seed (required)");
  sim->add_option("--mode", sim_args.mode, "considered (full grid) or ignored (zero correlation)");
  sim->add_option("--grid", sim_args.grid, "nuisance grid n1,n2,delta0 (default 10,7,0.9375)");
  sim->add_option("--config", sim_args.config, "JSON config with flat keys mirroring flags");
  sim->add_option("--threads", sim_args.threads, "worker threads (default: all cores)");
  sim->add_option("--out", sim_args.out, "output CSV path (default rates.csv)");

  try {
    app.parse(argc, argv);
    if (test->parsed()) return run_test_command(test_args);
    if (sim->parsed()) return run_sim_command(sim_args);
    return 4;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  } catch (const homscore::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 4;
  } catch (const homscore::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 3;
  } catch (const homscore::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
