#pragma once

#include <string>

namespace homscore {

enum class FamilyKind { gaussian, bernoulli, binomial };

// Exponential family with canonical link: identity for gaussian, logit for
// bernoulli/binomial. With a canonical link the natural parameter equals the
// linear predictor, so all score quantities reduce to derivatives of the
// cumulant function a(.) evaluated at eta.
//
// Gaussian density is parameterized with dispersion phi = 1/sigma^2 so that
// log p = phi * (y*theta - theta^2/2) + c(y, phi); discrete families have
// phi fixed at 1.
struct FamilySpec {
  FamilyKind kind = FamilyKind::gaussian;
  int trials = 1;  // binomial only; per-row values may override

  static FamilySpec gaussian() { return {FamilyKind::gaussian, 1}; }
  static FamilySpec bernoulli() { return {FamilyKind::bernoulli, 1}; }
  static FamilySpec binomial(int trials);

  FamilySpec with_trials(int t) const;

  bool estimates_dispersion() const { return kind == FamilyKind::gaussian; }
  bool discrete() const { return kind != FamilyKind::gaussian; }
  std::string name() const;
};

FamilySpec family_from_name(const std::string& name, int trials);

// Score pieces of one observation at the null (no random effects):
//   U = d/dt log p at t = 0,  V = -d^2/dt^2 log p at t = 0.
struct ScoreTerms {
  double u = 0.0;
  double v = 0.0;
  double e = 0.0;   // raw residual y - mu
  double mu = 0.0;  // fitted mean
};

// Null-hypothesis moments of U and V at a given (eta, phi):
// everything the variance formulas need.
struct MomentSet {
  double eu2 = 0.0;   // E U^2
  double eu4 = 0.0;   // E U^4
  double ev2 = 0.0;   // E V^2
  double eu2v = 0.0;  // E (U^2 V)
  double var_u2_minus_v = 0.0;
};

// Derivatives of the cumulant function a(.) at theta = eta.
struct CumulantDerivs {
  double a1, a2, a3, a4;
};

CumulantDerivs cumulant_derivs(const FamilySpec& family, double eta);

// Mean function mu = g(eta): trials * logistic(eta) for discrete families,
// identity for gaussian.
double link_mean(const FamilySpec& family, double eta);

bool in_support(const FamilySpec& family, double y);

ScoreTerms score_terms(const FamilySpec& family, double y, double eta, double phi);

// Closed-form moments. Agrees with moment_oracle; for the V moments that is
// the defining contract (see moment_oracle).
MomentSet central_moments(const FamilySpec& family, double eta, double phi);

// Independent check: computes the same moments with no closed-form moment
// algebra -- exact enumeration over the support for discrete families,
// 64-point Gauss-Hermite quadrature for gaussian. U(y) and V(y) come from
// score_terms; only the expectations are taken numerically.
MomentSet moment_oracle(const FamilySpec& family, double eta, double phi);

}  // namespace homscore
