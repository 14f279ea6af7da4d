#include "homscore/nullfit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "homscore/errors.hpp"

namespace homscore {

namespace {

constexpr double kScoreTol = 1e-8;
constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 30;

struct FlatView {
  std::vector<const Observation*> rows;
  std::vector<int> cluster_of;
};

FlatView flatten(const Dataset& data) {
  FlatView v;
  v.rows.reserve(data.n_obs());
  for (std::size_t i = 0; i < data.clusters.size(); ++i) {
    for (const auto& o : data.clusters[i].obs) {
      v.rows.push_back(&o);
      v.cluster_of.push_back(static_cast<int>(i));
    }
  }
  return v;
}

// Log-likelihood kernel sum(y * theta - a(theta)); the dispersion factor and
// c(y, phi) are constant in beta and dropped.
double beta_loglik(const FlatView& view, const FamilySpec& family, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (const Observation* o : view.rows) {
    const FamilySpec fam = row_family(family, *o);
    const double eta = o->x.dot(beta);
    if (fam.kind == FamilyKind::gaussian) {
      ll += o->y * eta - 0.5 * eta * eta;
    } else {
      double t = static_cast<double>(fam.trials);
      // log(1 + exp(eta)) without overflow
      double softplus = eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      ll += o->y * eta - t * softplus;
    }
  }
  return ll;
}

}  // namespace

FamilySpec row_family(const FamilySpec& family, const Observation& obs) {
  if (family.kind == FamilyKind::binomial && obs.trials > 0) return family.with_trials(obs.trials);
  return family;
}

void validate_support(const Dataset& data, const FamilySpec& family) {
  std::size_t row = 0;
  for (const auto& cluster : data.clusters) {
    for (const auto& o : cluster.obs) {
      ++row;
      if (!in_support(row_family(family, o), o.y)) {
        throw DataError("row " + std::to_string(row) + " (cluster '" + cluster.id + "'): y = " +
                        std::to_string(o.y) + " outside the " + family.name() + " support");
      }
    }
  }
}

NullFit fit_null(const Dataset& data, const FamilySpec& family) {
  data.validate();
  validate_support(data, family);

  const FlatView view = flatten(data);
  const int n = static_cast<int>(view.rows.size());
  const int p = static_cast<int>(view.rows.front()->x.size());

  {
    Eigen::MatrixXd xmat(n, p);
    for (int k = 0; k < n; ++k) xmat.row(k) = view.rows[static_cast<std::size_t>(k)]->x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xmat);
    if (qr.rank() < p) throw DataError("design matrix is rank-deficient");
  }

  NullFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  fit.phi = 1.0;

  double ll = beta_loglik(view, family, fit.beta);
  fit.loglik_trace.push_back(ll);

  Eigen::VectorXd score(p);
  Eigen::MatrixXd curvature(p, p);

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    score.setZero();
    curvature.setZero();
    for (const Observation* o : view.rows) {
      const FamilySpec fam = row_family(family, *o);
      const double eta = o->x.dot(fit.beta);
      const CumulantDerivs a = cumulant_derivs(fam, eta);
      score.noalias() += (o->y - a.a1) * o->x;
      curvature.noalias() += a.a2 * o->x * o->x.transpose();
    }
    if (score.lpNorm<Eigen::Infinity>() <= kScoreTol) {
      fit.converged = true;
      fit.iterations = iter - 1;
      break;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(curvature);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw ConvergenceError("Newton curvature matrix is not positive definite", fit.beta, iter);
    }
    Eigen::VectorXd step = ldlt.solve(score);

    // step-halve until the log-likelihood does not decrease; near the
    // optimum the true improvement falls below summation rounding noise,
    // so allow that much slack instead of rejecting the full Newton step
    const double noise = 1e-10 * (1.0 + std::abs(ll));
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      Eigen::VectorXd candidate = fit.beta + scale * step;
      double candidate_ll = beta_loglik(view, family, candidate);
      if (candidate_ll >= ll - noise) {
        fit.beta = candidate;
        ll = std::max(ll, candidate_ll);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("step-halving failed to improve the log-likelihood", fit.beta, iter);
    }
    fit.loglik_trace.push_back(ll);
    fit.iterations = iter;
  }

  if (!fit.converged) {
    score.setZero();
    for (const Observation* o : view.rows) {
      const FamilySpec fam = row_family(family, *o);
      score.noalias() += (o->y - cumulant_derivs(fam, o->x.dot(fit.beta)).a1) * o->x;
    }
    if (score.lpNorm<Eigen::Infinity>() <= kScoreTol) {
      fit.converged = true;
    } else {
      throw ConvergenceError(
          "no convergence in " + std::to_string(kMaxIterations) +
              " iterations (score sup-norm " + std::to_string(score.lpNorm<Eigen::Infinity>()) +
              "); data may be separated",
          fit.beta, fit.iterations);
    }
  }

  fit.eta.resize(n);
  fit.mu.resize(n);
  double rss = 0.0;
  bool all_boundary_fit = family.discrete();
  for (int k = 0; k < n; ++k) {
    const Observation* o = view.rows[static_cast<std::size_t>(k)];
    const FamilySpec fam = row_family(family, *o);
    fit.eta(k) = o->x.dot(fit.beta);
    fit.mu(k) = link_mean(fam, fit.eta(k));
    double e = o->y - fit.mu(k);
    rss += e * e;
    if (all_boundary_fit) {
      const bool boundary = o->y == 0.0 || o->y == static_cast<double>(fam.trials);
      all_boundary_fit = boundary && std::abs(e) < 1e-5;
    }
  }
  // every response on its support boundary and fitted exactly: the MLE sits
  // at infinity (complete separation), the score tolerance was met only
  // because the likelihood flattens out
  if (all_boundary_fit) {
    throw ConvergenceError("complete separation: every fitted value matches a boundary response",
                           fit.beta, fit.iterations);
  }

  if (family.estimates_dispersion()) {
    if (rss <= 0.0) {
      fit.phi = std::numeric_limits<double>::infinity();
      fit.phi_information = 0.0;
      fit.warnings.push_back("exact fit: residual variance is zero, dispersion degenerate");
    } else {
      fit.phi = static_cast<double>(n) / rss;
      fit.phi_information = 0.5 * static_cast<double>(n) / (fit.phi * fit.phi);
    }
  }

  fit.information = information_matrix(data, family, fit);
  return fit;
}

Eigen::MatrixXd influence_vectors(const Dataset& data, const FamilySpec& family,
                                  const NullFit& fit) {
  const FlatView view = flatten(data);
  const int n = static_cast<int>(view.rows.size());
  const int p = static_cast<int>(fit.beta.size());
  const bool with_phi = family.estimates_dispersion();
  const int dim = p + (with_phi ? 1 : 0);

  // F_K^beta = N * (sum a'' x x^T)^{-1} e_K x_K: the dispersion factor of the
  // score and of the information cancel.
  Eigen::MatrixXd curvature = Eigen::MatrixXd::Zero(p, p);
  for (int k = 0; k < n; ++k) {
    const Observation* o = view.rows[static_cast<std::size_t>(k)];
    const double a2 = cumulant_derivs(row_family(family, *o), fit.eta(k)).a2;
    curvature.noalias() += a2 * o->x * o->x.transpose();
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(curvature);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw DataError("singular information matrix");

  Eigen::MatrixXd f(n, dim);
  const bool phi_finite = std::isfinite(fit.phi);
  for (int k = 0; k < n; ++k) {
    const Observation* o = view.rows[static_cast<std::size_t>(k)];
    const double e = o->y - fit.mu(k);
    f.row(k).head(p) = static_cast<double>(n) * ldlt.solve(e * o->x).transpose();
    if (with_phi) {
      f(k, p) = phi_finite ? fit.phi * (1.0 - fit.phi * e * e) : 0.0;
    }
  }
  return f;
}

Eigen::MatrixXd information_matrix(const Dataset& data, const FamilySpec& family,
                                   const NullFit& fit) {
  const FlatView view = flatten(data);
  const int p = static_cast<int>(fit.beta.size());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t k = 0; k < view.rows.size(); ++k) {
    const Observation* o = view.rows[k];
    const double a2 = cumulant_derivs(row_family(family, *o), fit.eta(static_cast<int>(k))).a2;
    info.noalias() += a2 * o->x * o->x.transpose();
  }
  return fit.phi * info;
}

}  // namespace homscore
