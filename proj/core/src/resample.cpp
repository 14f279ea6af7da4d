#include "homscore/resample.hpp"

#include <cmath>
#include <random>

#include "homscore/errors.hpp"
#include "homscore/parallel.hpp"
#include "homscore/rng.hpp"

namespace homscore {

ResamplingPlan::ResamplingPlan(const Dataset& data, const FamilySpec& family, const NullFit& fit,
                               const NuisanceGrid& grid, const ScoreProfile& profile) {
  if (profile.points.size() != grid.points.size())
    throw ConfigError("profile does not cover the grid");
  n_gamma_ = static_cast<int>(grid.points.size());

  const ScoreContext ctx(data, family, fit);
  const Eigen::VectorXd& u = ctx.u();
  const Eigen::VectorXd& u2mv = ctx.u2_minus_v();
  const Eigen::MatrixXd& f = ctx.influence();

  // j_n(g)^T F_K for all (K, g) in one product
  Eigen::MatrixXd jmat(ctx.xi_dim(), n_gamma_);
  for (int g = 0; g < n_gamma_; ++g) jmat.col(g) = profile.points[static_cast<std::size_t>(g)].var.j_n;
  Eigen::MatrixXd fj = f * jmat;  // n_obs x n_gamma

  clusters_.resize(data.clusters.size());
  int base = 0;
  for (std::size_t i = 0; i < data.clusters.size(); ++i) {
    const auto& obs = data.clusters[i].obs;
    const int m = static_cast<int>(obs.size());
    const int n_pairs = m * (m - 1) / 2;
    ClusterCoeffs& cc = clusters_[i];
    cc.pair_coeff.setZero(n_pairs, n_gamma_);
    cc.diag_coeff.setZero(m, n_gamma_);
    for (int g = 0; g < n_gamma_; ++g) {
      const WMatrix w = w_matrix_q2(grid.points[static_cast<std::size_t>(g)]);
      int pair = 0;
      for (int a = 0; a < m; ++a) {
        const Eigen::VectorXd wza = w * obs[static_cast<std::size_t>(a)].z;
        const double baa = obs[static_cast<std::size_t>(a)].z.dot(wza);
        cc.diag_coeff(a, g) = baa * u2mv(base + a) - fj(base + a, g);
        for (int b = a + 1; b < m; ++b, ++pair) {
          const double bab = obs[static_cast<std::size_t>(b)].z.dot(wza);
          cc.pair_coeff(pair, g) = 2.0 * bab * u(base + a) * u(base + b);
        }
      }
    }
    base += m;
  }

  inv_sqrt_iep_.setZero(n_gamma_);
  inv_sqrt_ieo_.setZero(n_gamma_);
  inv_sqrt_ies_.setZero(n_gamma_);
  for (int g = 0; g < n_gamma_; ++g) {
    const ProfilePoint& pt = profile.points[static_cast<std::size_t>(g)];
    if (!pt.deg_p) inv_sqrt_iep_(g) = 1.0 / std::sqrt(pt.var.i_ep);
    if (!pt.deg_o) inv_sqrt_ieo_(g) = 1.0 / std::sqrt(pt.var.i_eo);
    if (!pt.deg_s) inv_sqrt_ies_(g) = 1.0 / std::sqrt(pt.var.i_es);
  }
}

void ResamplingPlan::cluster_contribution(std::uint64_t seed, int replicate, int cluster,
                                          Eigen::VectorXd& t_p_add, Eigen::VectorXd& t_o_add) const {
  const ClusterCoeffs& cc = clusters_[static_cast<std::size_t>(cluster)];
  const int m = static_cast<int>(cc.diag_coeff.rows());
  const int n_pairs = static_cast<int>(cc.pair_coeff.rows());

  std::mt19937_64 engine =
      make_engine(seed, static_cast<std::uint64_t>(replicate), static_cast<std::uint64_t>(cluster));
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd v_diag(m);
  for (int j = 0; j < m; ++j) v_diag(j) = normal(engine);
  Eigen::VectorXd v_pair(n_pairs);
  for (int j = 0; j < n_pairs; ++j) v_pair(j) = normal(engine);

  t_p_add.noalias() = cc.pair_coeff.transpose() * v_pair;
  t_o_add.noalias() = cc.diag_coeff.transpose() * v_diag;
}

void ResamplingPlan::raw_replicate(std::uint64_t seed, int replicate,
                                   Eigen::VectorXd& t_p, Eigen::VectorXd& t_o) const {
  t_p.setZero(n_gamma_);
  t_o.setZero(n_gamma_);
  Eigen::VectorXd tp_add(n_gamma_), to_add(n_gamma_);
  for (int i = 0; i < n_clusters(); ++i) {
    cluster_contribution(seed, replicate, i, tp_add, to_add);
    t_p += tp_add;
    t_o += to_add;
  }
}

void ResamplingPlan::sup_replicate(std::uint64_t seed, int replicate,
                                   double& s_o, double& s_p, double& s_s) const {
  Eigen::VectorXd t_p(n_gamma_), t_o(n_gamma_);
  raw_replicate(seed, replicate, t_p, t_o);
  s_o = s_p = s_s = 0.0;
  for (int g = 0; g < n_gamma_; ++g) {
    auto one_sided_sq = [](double x) { return x >= 0.0 ? x * x : 0.0; };
    s_p = std::max(s_p, one_sided_sq(t_p(g) * inv_sqrt_iep_(g)));
    s_o = std::max(s_o, one_sided_sq(t_o(g) * inv_sqrt_ieo_(g)));
    s_s = std::max(s_s, one_sided_sq((t_p(g) + t_o(g)) * inv_sqrt_ies_(g)));
  }
}

NullReplicates run_resampling(const ResamplingPlan& plan, int r0, std::uint64_t seed, int threads) {
  if (r0 < 1) throw ConfigError("r0 must be >= 1");
  NullReplicates out;
  out.r0 = r0;
  out.s_o.resize(r0);
  out.s_p.resize(r0);
  out.s_s.resize(r0);
  parallel_for(static_cast<std::size_t>(r0), threads, [&](std::size_t r) {
    plan.sup_replicate(seed, static_cast<int>(r), out.s_o(static_cast<Eigen::Index>(r)),
                       out.s_p(static_cast<Eigen::Index>(r)), out.s_s(static_cast<Eigen::Index>(r)));
  });
  return out;
}

PValues p_values(const SupStatistics& observed, const NullReplicates& reps) {
  if (reps.r0 < 1) throw ConfigError("p_values needs at least one replicate");
  auto one = [&](double obs, const Eigen::VectorXd& sims) {
    int count = 0;
    for (Eigen::Index r = 0; r < sims.size(); ++r)
      if (sims(r) >= obs) ++count;
    return static_cast<double>(1 + count) / static_cast<double>(reps.r0 + 1);
  };
  PValues p;
  p.p_o = one(observed.s_o, reps.s_o);
  p.p_p = one(observed.s_p, reps.s_p);
  p.p_s = one(observed.s_s, reps.s_s);
  return p;
}

}  // namespace homscore
