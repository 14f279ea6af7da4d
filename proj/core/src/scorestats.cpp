#include "homscore/scorestats.hpp"

#include <cmath>

#include "homscore/errors.hpp"

namespace homscore {

namespace {
constexpr double kDegenerateRel = 1e-12;
}

// ---------------------------------------------------------------------------
// ScoreContext
// ---------------------------------------------------------------------------

ScoreContext::ScoreContext(const Dataset& data, const FamilySpec& family, const NullFit& fit)
    : data_(&data) {
  if (!fit.converged) throw ConvergenceError("profile requires a converged fit", fit.beta, fit.iterations);
  if (!std::isfinite(fit.phi)) throw DataError("degenerate dispersion (zero residual variance)");

  const int n = static_cast<int>(data.n_obs());
  const int p = static_cast<int>(fit.beta.size());
  with_phi_ = family.estimates_dispersion();
  dim_ = p + (with_phi_ ? 1 : 0);

  u_.resize(n);
  v_.resize(n);
  u2mv_.resize(n);
  eu2_.resize(n);
  varu2v_.resize(n);
  jweight_.resize(n);
  xmat_.resize(n, p);

  int k = 0;
  for (const auto& cluster : data.clusters) {
    for (const auto& o : cluster.obs) {
      const FamilySpec fam = row_family(family, o);
      const ScoreTerms s = score_terms(fam, o.y, fit.eta(k), fit.phi);
      const MomentSet m = central_moments(fam, fit.eta(k), fit.phi);
      const CumulantDerivs a = cumulant_derivs(fam, fit.eta(k));
      u_(k) = s.u;
      v_(k) = s.v;
      u2mv_(k) = s.u * s.u - s.v;
      eu2_(k) = m.eu2;
      varu2v_(k) = m.var_u2_minus_v;
      jweight_(k) = fit.phi * a.a3;
      xmat_.row(k) = o.x;
      ++k;
    }
  }

  influence_ = influence_vectors(data, family, fit);

  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(dim_, dim_);
  info.topLeftCorner(p, p) = fit.information;
  if (with_phi_) {
    if (fit.phi_information <= 0.0) throw DataError("missing dispersion information");
    info(p, p) = fit.phi_information;
  }
  info_ldlt_.compute(info);
  if (info_ldlt_.info() != Eigen::Success || !info_ldlt_.isPositive())
    throw DataError("singular information matrix");
}

VarianceComponents ScoreContext::variance_components(const BlockCoefficients& blocks) const {
  const int n = n_obs();
  const int p = static_cast<int>(xmat_.cols());
  VarianceComponents out;

  double i_ep = 0.0;
  double i_to = 0.0;
  Eigen::VectorXd j = Eigen::VectorXd::Zero(dim_);

  int base = 0;
  for (const auto& block : blocks.blocks) {
    const int m = static_cast<int>(block.rows());
    for (int a = 0; a < m; ++a) {
      const int ka = base + a;
      const double baa = block(a, a);
      i_to += baa * baa * varu2v_(ka);
      j.head(p).noalias() += baa * jweight_(ka) * xmat_.row(ka).transpose();
      if (with_phi_) j(p) -= baa;
      for (int b = a + 1; b < m; ++b) {
        const int kb = base + b;
        const double bab = block(a, b);
        i_ep += 4.0 * bab * bab * eu2_(ka) * eu2_(kb);
      }
    }
    base += m;
  }
  j /= static_cast<double>(n);

  // plug-in variance of the corrected overdispersion term:
  // i_to minus the quadratic form of j_n in the inverse information
  const double correction =
      static_cast<double>(n) * static_cast<double>(n) * j.dot(info_ldlt_.solve(j));
  double i_eo = i_to - correction;
  out.ieo_floored = i_eo < 0.0;
  if (out.ieo_floored) i_eo = 0.0;

  out.i_ep = i_ep;
  out.i_to = i_to;
  out.i_eo = i_eo;
  out.i_es = i_ep + i_eo;
  out.j_n = std::move(j);
  return out;
}

// ---------------------------------------------------------------------------
// statistics
// ---------------------------------------------------------------------------

RawStatistics raw_statistics(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                             const BlockCoefficients& blocks) {
  RawStatistics out;
  int base = 0;
  for (const auto& block : blocks.blocks) {
    const int m = static_cast<int>(block.rows());
    for (int a = 0; a < m; ++a) {
      const int ka = base + a;
      out.t_o += block(a, a) * (u(ka) * u(ka) - v(ka));
      for (int b = a + 1; b < m; ++b) {
        out.t_p += 2.0 * block(a, b) * u(ka) * u(base + b);
      }
    }
    base += m;
  }
  if (base != static_cast<int>(u.size()) || u.size() != v.size())
    throw DataError("U/V vectors are not aligned with the block coefficients");
  out.t_s = out.t_p + out.t_o;
  return out;
}

VarianceComponents variance_components(const Dataset& data, const FamilySpec& family,
                                       const NullFit& fit, const BlockCoefficients& blocks) {
  return ScoreContext(data, family, fit).variance_components(blocks);
}

ScoreProfile compute_profile(const Dataset& data, const FamilySpec& family,
                             const NullFit& fit, const NuisanceGrid& grid) {
  if (grid.points.empty()) throw ConfigError("empty nuisance grid");
  const ScoreContext ctx(data, family, fit);

  ScoreProfile profile;
  profile.points.resize(grid.points.size());
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    ProfilePoint& pt = profile.points[g];
    pt.gamma = grid.points[g];
    const BlockCoefficients blocks = build_blocks(data, w_matrix_q2(pt.gamma));
    pt.raw = raw_statistics(ctx.u(), ctx.v(), blocks);
    pt.var = ctx.variance_components(blocks);
    if (pt.var.ieo_floored) ++profile.ieo_floor_count;
  }

  double max_iep = 0.0, max_ieo = 0.0, max_ies = 0.0;
  for (const auto& pt : profile.points) {
    max_iep = std::max(max_iep, pt.var.i_ep);
    max_ieo = std::max(max_ieo, pt.var.i_eo);
    max_ies = std::max(max_ies, pt.var.i_es);
  }

  for (auto& pt : profile.points) {
    pt.deg_p = pt.var.i_ep <= kDegenerateRel * max_iep;
    pt.deg_o = pt.var.i_eo <= kDegenerateRel * max_ieo;
    pt.deg_s = pt.var.i_es <= kDegenerateRel * max_ies;
    pt.x_p = standardized(pt.raw.t_p, pt.var.i_ep, pt.deg_p);
    pt.x_o = standardized(pt.raw.t_o, pt.var.i_eo, pt.deg_o);
    pt.x_s = standardized(pt.raw.t_s, pt.var.i_es, pt.deg_s);
    if (pt.deg_p || pt.deg_o) ++profile.degenerate_points;
  }
  return profile;
}

SupStatistics sup_statistics(const ScoreProfile& profile) {
  if (profile.points.empty()) throw ConfigError("sup over an empty profile");
  SupStatistics s;
  s.argmax_o = s.argmax_p = s.argmax_s = profile.points.front().gamma;
  for (const auto& pt : profile.points) {
    auto one_sided_sq = [](double x) { return x >= 0.0 ? x * x : 0.0; };
    const double so = one_sided_sq(pt.x_o);
    const double sp = one_sided_sq(pt.x_p);
    const double ss = one_sided_sq(pt.x_s);
    if (so > s.s_o) { s.s_o = so; s.argmax_o = pt.gamma; }
    if (sp > s.s_p) { s.s_p = sp; s.argmax_p = pt.gamma; }
    if (ss > s.s_s) { s.s_s = ss; s.argmax_s = pt.gamma; }
  }
  return s;
}

}  // namespace homscore
