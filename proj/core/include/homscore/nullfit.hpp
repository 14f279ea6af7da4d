#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"

namespace homscore {

// Maximum likelihood fit of the null model (no random effects).
// Observation-level vectors are flattened cluster-major, matching Dataset.
struct NullFit {
  Eigen::VectorXd beta;
  double phi = 1.0;  // 1/sigma^2 for gaussian, fixed 1 for discrete families

  Eigen::VectorXd eta;  // fitted linear predictors
  Eigen::VectorXd mu;   // fitted means

  // phi-scaled Fisher information for beta: phi * sum a''(theta_K) x_K x_K^T.
  Eigen::MatrixXd information;
  // Fisher information of phi (gaussian: N / (2 phi^2), otherwise 0).
  double phi_information = 0.0;

  bool converged = false;
  int iterations = 0;
  std::vector<double> loglik_trace;  // accepted-step log-likelihoods
  std::vector<std::string> warnings;

  int n_params() const {
    return static_cast<int>(beta.size()) + (phi_information > 0.0 ? 1 : 0);
  }
};

// Per-observation family with any row-level trials override applied.
FamilySpec row_family(const FamilySpec& family, const Observation& obs);

// Throws DataError naming the first offending row if any response is
// outside the family support.
void validate_support(const Dataset& data, const FamilySpec& family);

// Newton-Raphson (equivalently IRLS, canonical link) to score sup-norm
// <= 1e-8, with step-halving and a 100-iteration cap. Gaussian additionally
// sets phi = N / sum(e^2), the dispersion MLE.
NullFit fit_null(const Dataset& data, const FamilySpec& family);

// Per-observation influence vectors F_K, one row per observation, laid out
// as (beta components [, phi component]). They satisfy
// xi_hat - xi_* ~ mean of F_K, and their beta block sums to zero at the MLE.
Eigen::MatrixXd influence_vectors(const Dataset& data, const FamilySpec& family,
                                  const NullFit& fit);

// phi-scaled negated Hessian of the beta log-likelihood at the fit.
Eigen::MatrixXd information_matrix(const Dataset& data, const FamilySpec& family,
                                   const NullFit& fit);

}  // namespace homscore
