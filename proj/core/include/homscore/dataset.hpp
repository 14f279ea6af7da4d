#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

namespace homscore {

// One row: response, fixed-effect covariates x, random-effect covariates z.
// trials == 0 means "use the family default" (binomial only).
struct Observation {
  double y = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  int trials = 0;
};

struct Cluster {
  std::string id;
  std::vector<Observation> obs;
};

// Clustered data. Observations are ordered cluster-major throughout the
// library: flat index K runs over cluster 0's rows, then cluster 1's, ...
struct Dataset {
  std::vector<Cluster> clusters;

  std::size_t n_clusters() const { return clusters.size(); }

  std::size_t n_obs() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.obs.size();
    return n;
  }

  int xdim() const {
    for (const auto& c : clusters)
      if (!c.obs.empty()) return static_cast<int>(c.obs.front().x.size());
    return 0;
  }

  int zdim() const {
    for (const auto& c : clusters)
      if (!c.obs.empty()) return static_cast<int>(c.obs.front().z.size());
    return 0;
  }

  // Checks rectangular shape and unique cluster ids; throws DataError.
  void validate() const;
};

}  // namespace homscore
