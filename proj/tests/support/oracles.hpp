// Test-only oracles: independent brute-force implementations used to check
// the library. Nothing here may call back into the code paths under test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "homscore/covparam.hpp"
#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"
#include "homscore/nullfit.hpp"

namespace testsupport {

inline homscore::Observation obs(double y, std::vector<double> x, std::vector<double> z,
                                 int trials = 0) {
  homscore::Observation o;
  o.y = y;
  o.x = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  o.z = Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  o.trials = trials;
  return o;
}

inline homscore::Dataset dataset(std::vector<std::vector<homscore::Observation>> clusters) {
  homscore::Dataset d;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    homscore::Cluster c;
    c.id = "c" + std::to_string(i + 1);
    c.obs = std::move(clusters[i]);
    d.clusters.push_back(std::move(c));
  }
  return d;
}

// ---------------------------------------------------------------------------
// score-statistic oracles: naive double loop and dense-matrix route
// ---------------------------------------------------------------------------

struct RawOracle {
  double t_p, t_o, t_s;
};

// Ordered double loop over all pairs within a cluster, nothing shared with
// the production accumulation.
inline RawOracle naive_pair_loop(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const homscore::BlockCoefficients& blocks) {
  RawOracle out{0.0, 0.0, 0.0};
  int base = 0;
  for (const auto& block : blocks.blocks) {
    const int m = static_cast<int>(block.rows());
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        out.t_p += block(a, b) * u(base + a) * u(base + b);
      }
      out.t_o += block(a, a) * (u(base + a) * u(base + a) - v(base + a));
    }
    base += m;
  }
  out.t_s = out.t_p + out.t_o;
  return out;
}

// Dense quadratic form U^T B U - tr(V B) assembled per cluster.
inline double dense_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                         const homscore::BlockCoefficients& blocks) {
  double total = 0.0;
  int base = 0;
  for (const auto& block : blocks.blocks) {
    const int m = static_cast<int>(block.rows());
    Eigen::VectorXd uc = u.segment(base, m);
    Eigen::VectorXd vc = v.segment(base, m);
    total += uc.dot(block * uc) - (vc.asDiagonal() * block).trace();
    base += m;
  }
  return total;
}

// ---------------------------------------------------------------------------
// weighted maximum likelihood refit (influence-function oracle)
// ---------------------------------------------------------------------------

struct WeightedFit {
  Eigen::VectorXd beta;
  double phi = 1.0;
};

// Straightforward weighted Newton fit, written from scratch: maximizes
// sum_K w_K * log p_K. Used to difference the MLE in observation weights.
inline WeightedFit weighted_mle(const homscore::Dataset& data, const homscore::FamilySpec& family,
                                const Eigen::VectorXd& w) {
  std::vector<const homscore::Observation*> rows;
  for (const auto& c : data.clusters)
    for (const auto& o : c.obs) rows.push_back(&o);
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(rows.front()->x.size());

  WeightedFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd curv = Eigen::MatrixXd::Zero(p, p);
    for (int k = 0; k < n; ++k) {
      const auto fam = homscore::row_family(family, *rows[k]);
      const auto a = homscore::cumulant_derivs(fam, rows[k]->x.dot(fit.beta));
      score += w(k) * (rows[k]->y - a.a1) * rows[k]->x;
      curv += w(k) * a.a2 * rows[k]->x * rows[k]->x.transpose();
    }
    if (score.lpNorm<Eigen::Infinity>() < 1e-12) break;
    fit.beta += curv.ldlt().solve(score);
  }

  if (family.estimates_dispersion()) {
    double wsum = 0.0, wrss = 0.0;
    for (int k = 0; k < n; ++k) {
      double e = rows[k]->y - rows[k]->x.dot(fit.beta);
      wsum += w(k);
      wrss += w(k) * e * e;
    }
    fit.phi = wsum / wrss;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// random instances for fuzzing
// ---------------------------------------------------------------------------

struct FuzzInstance {
  homscore::Dataset data;
  homscore::FamilySpec family;
};

// Random family, shape and response drawn from the model itself so the null
// fit is well behaved. z always has dimension 2 (the q = 2 grid form).
inline FuzzInstance random_instance(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> family_pick(0, 2);
  std::uniform_int_distribution<int> n_pick(3, 6);
  std::uniform_int_distribution<int> m_pick(1, 5);
  std::uniform_int_distribution<int> trials_pick(2, 5);

  FuzzInstance inst;
  switch (family_pick(rng)) {
    case 0: inst.family = homscore::FamilySpec::gaussian(); break;
    case 1: inst.family = homscore::FamilySpec::bernoulli(); break;
    default: inst.family = homscore::FamilySpec::binomial(trials_pick(rng)); break;
  }

  const int p = 2;
  Eigen::VectorXd beta(p);
  beta << 0.3 * normal(rng), 0.3 * normal(rng);

  const int n = n_pick(rng);
  std::vector<std::vector<homscore::Observation>> clusters(static_cast<std::size_t>(n));
  for (auto& cluster : clusters) {
    const int m = m_pick(rng);
    for (int j = 0; j < m; ++j) {
      homscore::Observation o;
      o.x = Eigen::Vector2d(1.0, normal(rng));
      o.z = Eigen::Vector2d(normal(rng), normal(rng));
      const double eta = o.x.dot(beta);
      if (inst.family.kind == homscore::FamilyKind::gaussian) {
        o.y = eta + normal(rng);
      } else {
        const double prob = 1.0 / (1.0 + std::exp(-eta));
        std::binomial_distribution<int> draw(inst.family.trials, prob);
        o.y = static_cast<double>(draw(rng));
      }
      cluster.push_back(std::move(o));
    }
  }
  inst.data = dataset(std::move(clusters));
  return inst;
}

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testsupport
