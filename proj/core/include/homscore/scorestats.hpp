#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <vector>

#include "homscore/covparam.hpp"
#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"
#include "homscore/nullfit.hpp"

namespace homscore {

// Raw score statistics at one gamma. t_p collects the off-diagonal
// (pairwise-correlation) part of the score quadratic form, t_o the diagonal
// (overdispersion) part, and t_s is computed as their sum so the identity
// t_s = t_p + t_o holds bit-for-bit.
struct RawStatistics {
  double t_p = 0.0;
  double t_o = 0.0;
  double t_s = 0.0;
};

struct VarianceComponents {
  double i_ep = 0.0;  // variance of the pairwise term
  double i_to = 0.0;  // uncorrected variance of the overdispersion term
  double i_eo = 0.0;  // plug-in-corrected variance, floored at zero
  double i_es = 0.0;  // i_ep + i_eo
  Eigen::VectorXd j_n;  // sensitivity of t_o to the fitted (beta[, phi])
  bool ieo_floored = false;
};

// Shared, gamma-independent pieces of the profile: score terms, null
// moments at the fitted parameters, influence vectors and the inverse
// information, all flattened cluster-major.
class ScoreContext {
public:
  ScoreContext(const Dataset& data, const FamilySpec& family, const NullFit& fit);

  const Dataset& data() const { return *data_; }
  int n_obs() const { return static_cast<int>(u_.size()); }
  int xi_dim() const { return dim_; }

  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& v() const { return v_; }
  const Eigen::VectorXd& u2_minus_v() const { return u2mv_; }
  const Eigen::MatrixXd& influence() const { return influence_; }

  VarianceComponents variance_components(const BlockCoefficients& blocks) const;

private:
  const Dataset* data_;
  bool with_phi_;
  int dim_;
  Eigen::VectorXd u_, v_, u2mv_;
  Eigen::VectorXd eu2_, varu2v_, jweight_;
  Eigen::MatrixXd xmat_;
  Eigen::MatrixXd influence_;
  Eigen::LDLT<Eigen::MatrixXd> info_ldlt_;
};

RawStatistics raw_statistics(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                             const BlockCoefficients& blocks);

VarianceComponents variance_components(const Dataset& data, const FamilySpec& family,
                                       const NullFit& fit, const BlockCoefficients& blocks);

// t / sqrt(i), or zero at a degenerate point.
inline double standardized(double t, double variance, bool degenerate) {
  if (degenerate) return 0.0;
  return t / std::sqrt(variance);
}

struct ProfilePoint {
  GammaPoint gamma;
  RawStatistics raw;
  VarianceComponents var;
  double x_p = 0.0, x_o = 0.0, x_s = 0.0;
  bool deg_p = false, deg_o = false, deg_s = false;
};

struct ScoreProfile {
  std::vector<ProfilePoint> points;
  int degenerate_points = 0;  // points with i_ep or i_eo below threshold
  int ieo_floor_count = 0;    // points where the i_eo plug-in went negative
};

// Sweeps the grid: raw statistics, variances, degeneracy classification
// (variance below 1e-12 of its grid maximum) and standardization.
ScoreProfile compute_profile(const Dataset& data, const FamilySpec& family,
                             const NullFit& fit, const NuisanceGrid& grid);

struct SupStatistics {
  double s_o = 0.0, s_p = 0.0, s_s = 0.0;
  GammaPoint argmax_o, argmax_p, argmax_s;
};

// sup over the grid of x^2 * 1(x >= 0), first maximizer wins; an all-negative
// profile gives 0 with the first grid point as argmax.
SupStatistics sup_statistics(const ScoreProfile& profile);

}  // namespace homscore
