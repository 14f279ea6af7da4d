#include "homscore/simharness.hpp"

#include <atomic>
#include <cmath>

#include "homscore/errors.hpp"
#include "homscore/nullfit.hpp"
#include "homscore/parallel.hpp"
#include "homscore/resample.hpp"
#include "homscore/rng.hpp"
#include "homscore/scorestats.hpp"

namespace homscore {

namespace {
// fixed-effect coefficients of the two simulation models
constexpr double kIntercept = 1.0;
constexpr double kLogisticX1 = 0.8;
constexpr double kLogisticX2 = 0.5;
constexpr double kLinearX1 = 1.0;
constexpr double kLinearX2 = 1.0;
}  // namespace

void SimConfig::validate() const {
  if (n < 1 || m < 1) throw ConfigError("sim: n and m must be positive");
  if (reps < 1) throw ConfigError("sim: reps must be positive");
  if (r0 < 1) throw ConfigError("sim: r0 must be positive");
  if (sigma1_sq < 0.0) throw ConfigError("sim: sigma1_sq must be nonnegative");
  if (sigma2_sq < 0.0) throw ConfigError("sim: sigma2_sq must be nonnegative");
  if (rho1 * rho1 > rho2)
    throw ConfigError("sim: rho1^2 > rho2, random-effect covariance not PSD");
  if (sigma2_sq > 0.0 && sigma1_sq > 0.0)
    throw ConfigError("sim: the perturbed null requires sigma1_sq = 0");
  if (phi <= 0.0) throw ConfigError("sim: phi must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("sim: alpha must lie in (0, 1]");
  if (model == SimModel::linear && response == SimResponse::binomial)
    throw ConfigError("sim: the linear model has a gaussian response");
  if (response == SimResponse::binomial && trials < 1)
    throw ConfigError("sim: binomial response requires trials >= 1");
}

FamilySpec SimConfig::family() const {
  if (model == SimModel::linear) return FamilySpec::gaussian();
  return response == SimResponse::binomial ? FamilySpec::binomial(trials)
                                           : FamilySpec::bernoulli();
}

Eigen::Vector2d sample_random_effects(std::mt19937_64& rng, double sigma1_sq, double rho1,
                                      double rho2) {
  if (sigma1_sq == 0.0) return Eigen::Vector2d::Zero();
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s1 = std::sqrt(sigma1_sq);
  const double n1 = normal(rng);
  const double n2 = normal(rng);
  // 2x2 Cholesky of sigma1_sq * [[1, rho1], [rho1, rho2]]
  Eigen::Vector2d b;
  b(0) = s1 * n1;
  b(1) = s1 * (rho1 * n1 + std::sqrt(rho2 - rho1 * rho1) * n2);
  return b;
}

namespace {

double draw_response(const SimConfig& config, double eta, std::mt19937_64& rng) {
  const double p = link_mean(FamilySpec::bernoulli(), eta);
  if (config.response == SimResponse::binomial) {
    std::binomial_distribution<int> binom(config.trials, p);
    return static_cast<double>(binom(rng));
  }
  std::bernoulli_distribution bern(p);
  return bern(rng) ? 1.0 : 0.0;
}

Dataset gen_discrete(const SimConfig& config, std::mt19937_64& rng, bool perturbed) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.clusters.resize(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) {
    Cluster& cluster = data.clusters[static_cast<std::size_t>(i)];
    cluster.id = std::to_string(i + 1);
    cluster.obs.resize(static_cast<std::size_t>(config.m));
    const Eigen::Vector2d b =
        perturbed ? Eigen::Vector2d::Zero()
                  : sample_random_effects(rng, config.sigma1_sq, config.rho1, config.rho2);
    for (int j = 0; j < config.m; ++j) {
      Observation& o = cluster.obs[static_cast<std::size_t>(j)];
      const double x1 = normal(rng);
      const double x2 = normal(rng);
      const double z1 = normal(rng);
      double eta = kIntercept + kLogisticX1 * x1 + kLogisticX2 * x2 + b(0) + z1 * b(1);
      if (perturbed) eta += config.sigma2_sq * normal(rng);
      o.x = Eigen::Vector3d(1.0, x1, x2);
      o.z = Eigen::Vector2d(1.0, z1);
      o.y = draw_response(config, eta, rng);
      if (config.response == SimResponse::binomial) o.trials = config.trials;
    }
  }
  return data;
}

Dataset gen_gaussian(const SimConfig& config, std::mt19937_64& rng, bool perturbed) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.clusters.resize(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) {
    Cluster& cluster = data.clusters[static_cast<std::size_t>(i)];
    cluster.id = std::to_string(i + 1);
    cluster.obs.resize(static_cast<std::size_t>(config.m));
    const Eigen::Vector2d b =
        perturbed ? Eigen::Vector2d::Zero()
                  : sample_random_effects(rng, config.sigma1_sq, config.rho1, config.rho2);
    for (int j = 0; j < config.m; ++j) {
      Observation& o = cluster.obs[static_cast<std::size_t>(j)];
      const double x1 = normal(rng);
      const double x2 = normal(rng);
      const double z1 = normal(rng);
      double noise_var = config.phi;
      if (perturbed) noise_var = config.phi * std::exp(normal(rng) * config.sigma2_sq);
      const double mean = kIntercept + kLinearX1 * x1 + kLinearX2 * x2 + b(0) + z1 * b(1);
      o.x = Eigen::Vector3d(1.0, x1, x2);
      o.z = Eigen::Vector2d(1.0, z1);
      o.y = mean + std::sqrt(noise_var) * normal(rng);
    }
  }
  return data;
}

}  // namespace

Dataset gen_logistic(const SimConfig& config, std::mt19937_64& rng) {
  return gen_discrete(config, rng, /*perturbed=*/false);
}

Dataset gen_linear(const SimConfig& config, std::mt19937_64& rng) {
  return gen_gaussian(config, rng, /*perturbed=*/false);
}

Dataset gen_perturbed(const SimConfig& config, std::mt19937_64& rng) {
  if (config.sigma1_sq != 0.0)
    throw ConfigError("gen_perturbed requires sigma1_sq = 0");
  return config.model == SimModel::linear ? gen_gaussian(config, rng, /*perturbed=*/true)
                                          : gen_discrete(config, rng, /*perturbed=*/true);
}

Dataset generate_dataset(const SimConfig& config, std::mt19937_64& rng) {
  if (config.sigma2_sq > 0.0) return gen_perturbed(config, rng);
  return config.model == SimModel::linear ? gen_linear(config, rng) : gen_logistic(config, rng);
}

RateTable estimate_rates(const SimConfig& config) {
  config.validate();

  GridSpec grid_spec = config.grid;
  if (config.mode == CorrelationMode::ignored) grid_spec.n2 = 1;
  const NuisanceGrid grid = make_grid(grid_spec);
  const FamilySpec family = config.family();

  // per-replication outcome: -1 excluded, otherwise bitmask of rejections
  std::vector<int> outcome(static_cast<std::size_t>(config.reps), -1);

  parallel_for(static_cast<std::size_t>(config.reps), config.threads, [&](std::size_t rep) {
    std::mt19937_64 rng = make_engine(config.seed, rep, 0);
    const Dataset data = generate_dataset(config, rng);
    try {
      const NullFit fit = fit_null(data, family);
      const ScoreProfile profile = compute_profile(data, family, fit, grid);
      const SupStatistics sup = sup_statistics(profile);
      const ResamplingPlan plan(data, family, fit, grid, profile);
      const NullReplicates reps =
          run_resampling(plan, config.r0, substream_seed(config.seed, rep, 1), 1);
      const PValues p = p_values(sup, reps);
      int mask = 0;
      if (p.p_o <= config.alpha) mask |= 1;
      if (p.p_p <= config.alpha) mask |= 2;
      if (p.p_s <= config.alpha) mask |= 4;
      outcome[rep] = mask;
    } catch (const ConvergenceError&) {
      outcome[rep] = -1;
    } catch (const DataError&) {
      outcome[rep] = -1;
    }
  });

  int used = 0;
  int hits[3] = {0, 0, 0};
  for (int mask : outcome) {
    if (mask < 0) continue;
    ++used;
    if (mask & 1) ++hits[0];
    if (mask & 2) ++hits[1];
    if (mask & 4) ++hits[2];
  }

  RateTable table;
  table.excluded = config.reps - used;
  const char* stat_names[3] = {"s_o", "s_p", "s_s"};
  const bool perturbed = config.sigma2_sq > 0.0;
  for (int s = 0; s < 3; ++s) {
    RateRow row;
    row.model = config.model == SimModel::linear ? "linear" : "logistic";
    row.statistic = stat_names[s];
    row.param = perturbed ? "sigma2_sq" : "sigma1_sq";
    row.value = perturbed ? config.sigma2_sq : config.sigma1_sq;
    row.mode = config.mode == CorrelationMode::ignored ? "ignored" : "considered";
    row.reps = used;
    row.rate = used > 0 ? static_cast<double>(hits[s]) / used : 0.0;
    row.se = used > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / used) : 0.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace homscore
