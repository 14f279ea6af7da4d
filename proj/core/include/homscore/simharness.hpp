#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "homscore/covparam.hpp"
#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"

namespace homscore {

enum class SimModel { logistic, linear };
enum class SimResponse { bernoulli, binomial };
enum class CorrelationMode { considered, ignored };

// Monte Carlo study configuration. The logistic model draws the response
// from logit P(y=1) = 1 + 0.8 x1 + 0.5 x2 + (b1 + z1 b2); the linear model
// from y = 1 + x1 + x2 + (b1 + z1 b2) + eps with eps ~ N(0, phi). The random
// effects b are bivariate normal with covariance sigma1_sq * [[1, rho1],
// [rho1, rho2]]. sigma2_sq > 0 switches to the overdispersion-perturbed
// null: a per-observation N(0,1) shock scaled by sigma2_sq enters the
// intercept (discrete) or the log noise variance (linear), with sigma1 = 0.
struct SimConfig {
  SimModel model = SimModel::logistic;
  SimResponse response = SimResponse::bernoulli;
  int trials = 5;  // binomial response only
  int n = 50;      // clusters
  int m = 5;       // observations per cluster
  double sigma1_sq = 0.0;
  double rho1 = 0.5;
  double rho2 = 1.0;
  double sigma2_sq = 0.0;
  double phi = 1.0;  // linear-model noise variance
  int reps = 300;
  int r0 = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  GridSpec grid{10, 7, 15.0 / 16.0};
  CorrelationMode mode = CorrelationMode::considered;
  int threads = 0;

  void validate() const;
  FamilySpec family() const;
};

// One (cluster-correlated) draw of the bivariate random effect.
Eigen::Vector2d sample_random_effects(std::mt19937_64& rng, double sigma1_sq, double rho1,
                                      double rho2);

Dataset gen_logistic(const SimConfig& config, std::mt19937_64& rng);
Dataset gen_linear(const SimConfig& config, std::mt19937_64& rng);
// Null model with nuisance overdispersion (requires sigma1_sq = 0).
Dataset gen_perturbed(const SimConfig& config, std::mt19937_64& rng);

// Dispatch on model and sigma2_sq.
Dataset generate_dataset(const SimConfig& config, std::mt19937_64& rng);

struct RateRow {
  std::string model;
  std::string statistic;  // s_o, s_p, s_s
  std::string param;      // name of the varied parameter
  double value = 0.0;
  std::string mode;
  double rate = 0.0;
  double se = 0.0;
  int reps = 0;
};

struct RateTable {
  std::vector<RateRow> rows;
  int excluded = 0;  // replications dropped for fit failures
};

// Monte Carlo rejection rates of the three sup statistics: per replication
// generate, fit the null, profile, resample r0 times, reject at alpha.
// Replications run in parallel from per-replication derived seeds.
RateTable estimate_rates(const SimConfig& config);

}  // namespace homscore
