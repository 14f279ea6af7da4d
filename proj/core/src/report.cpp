#include "homscore/report.hpp"

#include <cmath>

#include "homscore/errors.hpp"
#include "homscore/nullfit.hpp"
#include "homscore/resample.hpp"
#include "homscore/scorestats.hpp"

namespace homscore {

bool operator==(const TestReport& a, const TestReport& b) {
  auto gp_eq = [](const GammaPoint& x, const GammaPoint& y) {
    return x.gamma1 == y.gamma1 && x.gamma2 == y.gamma2;
  };
  return a.family == b.family && a.trials == b.trials && a.n == b.n && a.n_total == b.n_total &&
         a.beta_hat == b.beta_hat && a.phi_hat == b.phi_hat && a.grid.n1 == b.grid.n1 &&
         a.grid.n2 == b.grid.n2 && a.grid.delta0 == b.grid.delta0 && a.r0 == b.r0 &&
         a.seed == b.seed && a.alpha == b.alpha && a.s_o == b.s_o && a.s_p == b.s_p &&
         a.s_s == b.s_s && gp_eq(a.argmax_o, b.argmax_o) && gp_eq(a.argmax_p, b.argmax_p) &&
         gp_eq(a.argmax_s, b.argmax_s) && a.p_o == b.p_o && a.p_p == b.p_p && a.p_s == b.p_s &&
         a.reject_o == b.reject_o && a.reject_p == b.reject_p && a.reject_s == b.reject_s &&
         a.degenerate_grid_points == b.degenerate_grid_points && a.ieo_floored == b.ieo_floored &&
         a.warnings == b.warnings;
}

TestReport run_test(const Dataset& data, const FamilySpec& family, const GridSpec& grid_spec,
                    int r0, std::uint64_t seed, double alpha, int threads) {
  if (r0 < 1) throw ConfigError("r0 must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  data.validate();
  validate_support(data, family);

  TestReport report;
  report.family = family.name();
  report.trials = family.trials;
  report.n = static_cast<int>(data.n_clusters());
  report.n_total = static_cast<long long>(data.n_obs());
  report.grid = grid_spec;
  report.r0 = r0;
  report.seed = seed;
  report.alpha = alpha;

  if (family.kind != FamilyKind::binomial) {
    bool has_trials = false;
    for (const auto& c : data.clusters)
      for (const auto& o : c.obs) has_trials = has_trials || o.trials > 0;
    if (has_trials)
      report.warnings.push_back("trials column ignored for family " + family.name());
  }

  const NullFit fit = fit_null(data, family);
  report.beta_hat.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
  report.phi_hat = family.estimates_dispersion() ? 1.0 / fit.phi : fit.phi;
  for (const auto& w : fit.warnings) report.warnings.push_back(w);

  const NuisanceGrid grid = make_grid(grid_spec);
  const ScoreProfile profile = compute_profile(data, family, fit, grid);
  report.degenerate_grid_points = profile.degenerate_points;
  report.ieo_floored = profile.ieo_floor_count;
  if (profile.ieo_floor_count > 0)
    report.warnings.push_back("overdispersion variance floored at 0 at " +
                              std::to_string(profile.ieo_floor_count) + " grid points");

  const SupStatistics sup = sup_statistics(profile);
  report.s_o = sup.s_o;
  report.s_p = sup.s_p;
  report.s_s = sup.s_s;
  report.argmax_o = sup.argmax_o;
  report.argmax_p = sup.argmax_p;
  report.argmax_s = sup.argmax_s;

  const ResamplingPlan plan(data, family, fit, grid, profile);
  const NullReplicates reps = run_resampling(plan, r0, seed, threads);
  const PValues p = p_values(sup, reps);
  report.p_o = p.p_o;
  report.p_p = p.p_p;
  report.p_s = p.p_s;
  report.reject_o = p.p_o <= alpha;
  report.reject_p = p.p_p <= alpha;
  report.reject_s = p.p_s <= alpha;
  return report;
}

}  // namespace homscore
