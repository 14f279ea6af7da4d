#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "homscore/covparam.hpp"
#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"
#include "homscore/nullfit.hpp"
#include "homscore/scorestats.hpp"

namespace homscore {

// Sup statistics of the resampled null replicates.
struct NullReplicates {
  int r0 = 0;
  Eigen::VectorXd s_o, s_p, s_s;
};

struct PValues {
  double p_o = 1.0, p_p = 1.0, p_s = 1.0;
};

// Precomputed multiplier-resampling coefficients. Conditional on the data,
// each replicate draws fresh standard-normal multipliers -- one per
// within-cluster unordered pair and one per diagonal entry -- and forms
//   t_p^(r)(g) = sum over pairs   2 b_{K,K'}(g) u_K u_K' * v_pair
//   t_o^(r)(g) = sum over K       {b_{K,K}(g)(u_K^2 - v_K) - j_n(g)^T F_K} * v_diag
// The pair coefficient carries the factor 2 (both orderings of the pair) so
// that the conditional variance reproduces the variance of the observed
// statistics. Replicates are standardized by the same normalizers as the
// observed statistics and reduced to sups over the same grid.
//
// Multipliers are generated streamwise from substreams keyed by
// (seed, replicate, cluster index): diagonal draws first, then pairs in
// row-major (j < k) order. Results are independent of evaluation order.
class ResamplingPlan {
public:
  ResamplingPlan(const Dataset& data, const FamilySpec& family, const NullFit& fit,
                 const NuisanceGrid& grid, const ScoreProfile& profile);

  int n_gamma() const { return n_gamma_; }
  int n_clusters() const { return static_cast<int>(clusters_.size()); }

  // Unstandardized replicate statistics per grid point.
  void raw_replicate(std::uint64_t seed, int replicate,
                     Eigen::VectorXd& t_p, Eigen::VectorXd& t_o) const;

  // One cluster's contribution to a replicate; raw_replicate is the sum of
  // these over clusters in index order.
  void cluster_contribution(std::uint64_t seed, int replicate, int cluster,
                            Eigen::VectorXd& t_p_add, Eigen::VectorXd& t_o_add) const;

  // Standardized, one-sided sup statistics of one replicate.
  void sup_replicate(std::uint64_t seed, int replicate,
                     double& s_o, double& s_p, double& s_s) const;

private:
  struct ClusterCoeffs {
    Eigen::MatrixXd pair_coeff;  // n_pairs x n_gamma
    Eigen::MatrixXd diag_coeff;  // m x n_gamma
  };
  int n_gamma_ = 0;
  std::vector<ClusterCoeffs> clusters_;
  Eigen::VectorXd inv_sqrt_iep_, inv_sqrt_ieo_, inv_sqrt_ies_;  // zero where degenerate
};

// r0 independent replicates from deterministic (seed, replicate) substreams;
// any parallel schedule yields identical stored vectors.
NullReplicates run_resampling(const ResamplingPlan& plan, int r0, std::uint64_t seed,
                              int threads = 0);

// Add-one empirical p-values: (1 + #{replicate >= observed}) / (r0 + 1).
PValues p_values(const SupStatistics& observed, const NullReplicates& reps);

}  // namespace homscore
