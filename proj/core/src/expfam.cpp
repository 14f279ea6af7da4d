#include "homscore/expfam.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "homscore/errors.hpp"

namespace homscore {

FamilySpec FamilySpec::binomial(int trials) {
  if (trials < 1) throw ConfigError("binomial family requires trials >= 1");
  return {FamilyKind::binomial, trials};
}

FamilySpec FamilySpec::with_trials(int t) const {
  if (t < 1) throw ConfigError("trials must be >= 1");
  FamilySpec out = *this;
  out.trials = t;
  return out;
}

std::string FamilySpec::name() const {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::bernoulli: return "bernoulli";
    case FamilyKind::binomial: return "binomial";
  }
  return "?";
}

FamilySpec family_from_name(const std::string& name, int trials) {
  if (name == "gaussian") return FamilySpec::gaussian();
  if (name == "bernoulli") return FamilySpec::bernoulli();
  if (name == "binomial") return FamilySpec::binomial(trials);
  throw ConfigError("unknown family '" + name + "' (expected gaussian, bernoulli or binomial)");
}

static double logistic(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  double t = std::exp(eta);
  return t / (1.0 + t);
}

CumulantDerivs cumulant_derivs(const FamilySpec& family, double eta) {
  if (family.kind == FamilyKind::gaussian) {
    // a(theta) = theta^2 / 2
    return {eta, 1.0, 0.0, 0.0};
  }
  // a(theta) = trials * log(1 + exp(theta))
  const double t = static_cast<double>(family.trials);
  const double p = logistic(eta);
  const double v = p * (1.0 - p);
  return {t * p, t * v, t * v * (1.0 - 2.0 * p), t * v * (1.0 - 6.0 * p + 6.0 * p * p)};
}

double link_mean(const FamilySpec& family, double eta) {
  if (!std::isfinite(eta)) throw std::domain_error("link_mean: eta must be finite");
  if (family.kind == FamilyKind::gaussian) return eta;
  return static_cast<double>(family.trials) * logistic(eta);
}

bool in_support(const FamilySpec& family, double y) {
  if (!std::isfinite(y)) return false;
  if (family.kind == FamilyKind::gaussian) return true;
  if (y != std::floor(y)) return false;
  return y >= 0.0 && y <= static_cast<double>(family.trials);
}

ScoreTerms score_terms(const FamilySpec& family, double y, double eta, double phi) {
  if (phi <= 0.0) throw std::domain_error("score_terms: phi must be positive");
  if (!in_support(family, y)) {
    throw DataError("y = " + std::to_string(y) + " outside the " + family.name() + " support");
  }
  ScoreTerms out;
  out.mu = link_mean(family, eta);
  out.e = y - out.mu;
  out.u = phi * out.e;
  out.v = phi * cumulant_derivs(family, eta).a2;
  return out;
}

MomentSet central_moments(const FamilySpec& family, double eta, double phi) {
  if (phi <= 0.0) throw std::domain_error("central_moments: phi must be positive");
  const CumulantDerivs a = cumulant_derivs(family, eta);
  // Cumulants of y are a^(r)(theta) / phi^(r-1), and V = phi * a2 is
  // nonrandom under a canonical link, which fixes the V moments.
  MomentSet m;
  m.eu2 = phi * a.a2;
  m.eu4 = 3.0 * phi * phi * a.a2 * a.a2 + phi * a.a4;
  m.ev2 = phi * phi * a.a2 * a.a2;
  m.eu2v = phi * a.a2 * m.eu2;
  m.var_u2_minus_v = m.eu4 + m.ev2 - 2.0 * m.eu2v;
  return m;
}

// ---------------------------------------------------------------------------
// moment_oracle
// ---------------------------------------------------------------------------

namespace {

// Probabilists' Gauss-Hermite rule (weight = standard normal density) via
// Golub-Welsch on the Jacobi matrix of the Hermite recurrence.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      double off = std::sqrt(static_cast<double>(k));
      jacobi(k, k - 1) = off;
      jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
      nodes[k] = eig.eigenvalues()(k);
      double v0 = eig.eigenvectors()(0, k);
      weights[k] = v0 * v0;
    }
  }
};

double binom_pmf(int trials, int y, double p) {
  // log C(T, y) + y log p + (T - y) log(1 - p), stable for the small T here
  double logc = std::lgamma(trials + 1.0) - std::lgamma(y + 1.0) - std::lgamma(trials - y + 1.0);
  double lp = y > 0 ? y * std::log(p) : 0.0;
  double lq = trials - y > 0 ? (trials - y) * std::log1p(-p) : 0.0;
  return std::exp(logc + lp + lq);
}

}  // namespace

MomentSet moment_oracle(const FamilySpec& family, double eta, double phi) {
  if (phi <= 0.0) throw std::domain_error("moment_oracle: phi must be positive");

  double eu2 = 0.0, eu4 = 0.0, ev2 = 0.0, eu2v = 0.0;
  double eu2mv = 0.0, eu2mv_sq = 0.0;

  auto accumulate = [&](double w, double y) {
    ScoreTerms s = score_terms(family, y, eta, phi);
    double u2 = s.u * s.u;
    eu2 += w * u2;
    eu4 += w * u2 * u2;
    ev2 += w * s.v * s.v;
    eu2v += w * u2 * s.v;
    double d = u2 - s.v;
    eu2mv += w * d;
    eu2mv_sq += w * d * d;
  };

  if (family.discrete()) {
    const double p = logistic(eta);
    for (int y = 0; y <= family.trials; ++y) {
      accumulate(binom_pmf(family.trials, y, p), static_cast<double>(y));
    }
  } else {
    static const GaussHermite rule(64);
    const double sd = 1.0 / std::sqrt(phi);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      accumulate(rule.weights[k], eta + sd * rule.nodes[k]);
    }
  }

  MomentSet m;
  m.eu2 = eu2;
  m.eu4 = eu4;
  m.ev2 = ev2;
  m.eu2v = eu2v;
  m.var_u2_minus_v = eu2mv_sq - eu2mv * eu2mv;
  return m;
}

}  // namespace homscore
