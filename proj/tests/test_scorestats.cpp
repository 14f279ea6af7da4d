#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "homscore/covparam.hpp"
#include "homscore/errors.hpp"
#include "homscore/nullfit.hpp"
#include "homscore/scorestats.hpp"
#include "support/oracles.hpp"

using namespace homscore;
using testsupport::close;
using testsupport::dataset;
using testsupport::obs;

TEST_CASE("raw_statistics hand values") {
  // one cluster of two, all-ones block
  Dataset d = dataset({{obs(0, {1}, {1, 0}), obs(0, {1}, {1, 0})}});
  BlockCoefficients ones;
  ones.blocks.push_back(Eigen::MatrixXd::Ones(2, 2));

  SUBCASE("U = (1, -1), V = (1, 1)") {
    Eigen::VectorXd u(2), v(2);
    u << 1, -1;
    v << 1, 1;
    RawStatistics r = raw_statistics(u, v, ones);
    CHECK(r.t_p == -2.0);
    CHECK(r.t_o == 0.0);
    CHECK(r.t_s == -2.0);
    CHECK(testsupport::dense_form(u, v, ones) == doctest::Approx(-2.0).epsilon(1e-15));
  }

  SUBCASE("all U zero") {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2), v(2);
    v << 0.3, 0.9;
    RawStatistics r = raw_statistics(u, v, ones);
    CHECK(r.t_p == 0.0);
    CHECK(r.t_o == doctest::Approx(-1.2).epsilon(1e-15));
  }

  SUBCASE("zero blocks") {
    BlockCoefficients zero;
    zero.blocks.push_back(Eigen::MatrixXd::Zero(2, 2));
    Eigen::VectorXd u(2), v(2);
    u << 2, 3;
    v << 1, 1;
    RawStatistics r = raw_statistics(u, v, zero);
    CHECK(r.t_p == 0.0);
    CHECK(r.t_o == 0.0);
    CHECK(r.t_s == 0.0);
  }
}

TEST_CASE("raw_statistics equals the pair-loop and dense-form oracles") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> g1_draw(0.2, 3.1);
  std::uniform_real_distribution<double> g2_draw(-0.9, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    testsupport::FuzzInstance inst = testsupport::random_instance(rng);
    const int n = static_cast<int>(inst.data.n_obs());
    REQUIRE(n <= 30);
    Eigen::VectorXd u(n), v(n);
    for (int k = 0; k < n; ++k) {
      u(k) = normal(rng);
      v(k) = normal(rng);
    }
    WMatrix w = w_matrix_q2({g1_draw(rng), g2_draw(rng)});
    BlockCoefficients blocks = build_blocks(inst.data, w);

    RawStatistics r = raw_statistics(u, v, blocks);
    testsupport::RawOracle o = testsupport::naive_pair_loop(u, v, blocks);
    CHECK(close(r.t_p, o.t_p, 1e-10));
    CHECK(close(r.t_o, o.t_o, 1e-10));
    CHECK(close(r.t_s, testsupport::dense_form(u, v, blocks), 1e-10));
  }
}

namespace {

Dataset gaussian_fixture(std::mt19937_64& rng, int n_clusters = 6, int m = 4) {
  std::normal_distribution<double> normal;
  std::vector<std::vector<Observation>> clusters;
  for (int i = 0; i < n_clusters; ++i) {
    std::vector<Observation> rows;
    for (int j = 0; j < m; ++j) {
      double x1 = normal(rng);
      rows.push_back(obs(0.5 + x1 + normal(rng), {1, x1}, {1.0, normal(rng)}));
    }
    clusters.push_back(std::move(rows));
  }
  return dataset(std::move(clusters));
}

}  // namespace

TEST_CASE("variance_components") {
  std::mt19937_64 rng(7);

  SUBCASE("gaussian: j_n beta block vanishes, phi correction is explicit") {
    Dataset d = gaussian_fixture(rng);
    NullFit fit = fit_null(d, FamilySpec::gaussian());
    BlockCoefficients blocks = build_blocks(d, w_matrix_q2({1.1, 0.25}));
    VarianceComponents vc = variance_components(d, FamilySpec::gaussian(), fit, blocks);

    CHECK(vc.j_n.size() == 3);  // two beta components + phi
    CHECK(std::abs(vc.j_n(0)) < 1e-12);
    CHECK(std::abs(vc.j_n(1)) < 1e-12);

    double sum_b = 0.0;
    for (const auto& block : blocks.blocks) sum_b += block.diagonal().sum();
    const double n = static_cast<double>(d.n_obs());
    const double expected_correction = 2.0 * fit.phi * fit.phi * sum_b * sum_b / n;
    CHECK(close(vc.i_eo, vc.i_to - expected_correction, 1e-10));
    CHECK(vc.i_es == vc.i_ep + vc.i_eo);
  }

  SUBCASE("balanced bernoulli: overdispersion channel is degenerate") {
    Dataset d = dataset({{obs(1, {1}, {1, 0.3}), obs(0, {1}, {1, -0.8})},
                         {obs(1, {1}, {1, 0.5}), obs(0, {1}, {1, 1.2})}});
    NullFit fit = fit_null(d, FamilySpec::bernoulli());
    REQUIRE(std::abs(fit.beta(0)) < 1e-10);
    BlockCoefficients blocks = build_blocks(d, w_matrix_q2({0.8, 0.5}));
    VarianceComponents vc = variance_components(d, FamilySpec::bernoulli(), fit, blocks);
    CHECK(std::abs(vc.i_to) < 1e-20);
    CHECK(vc.i_eo == 0.0);
    CHECK(vc.i_ep > 0.0);
  }

  SUBCASE("zero W: all variances zero, every point degenerate") {
    Dataset d = gaussian_fixture(rng);
    NullFit fit = fit_null(d, FamilySpec::gaussian());
    BlockCoefficients zero = build_blocks(d, Eigen::MatrixXd::Zero(2, 2));
    VarianceComponents vc = variance_components(d, FamilySpec::gaussian(), fit, zero);
    CHECK(vc.i_ep == 0.0);
    CHECK(vc.i_to == 0.0);
    CHECK(vc.i_eo == 0.0);
  }
}

TEST_CASE("standardize") {
  CHECK(standardized(0.0, 4.0, false) == 0.0);
  CHECK(standardized(-2.0, 4.0, false) == -1.0);
  CHECK(standardized(123.0, 0.0, true) == 0.0);
}

TEST_CASE("profile identities and degeneracy bookkeeping") {
  std::mt19937_64 rng(15);
  Dataset d = gaussian_fixture(rng);
  NullFit fit = fit_null(d, FamilySpec::gaussian());
  NuisanceGrid grid = make_grid({6, 5, 0.9});
  ScoreProfile profile = compute_profile(d, FamilySpec::gaussian(), fit, grid);
  REQUIRE(profile.points.size() == 30);

  for (const auto& pt : profile.points) {
    // bit-exact channel sum
    CHECK(pt.raw.t_s == pt.raw.t_p + pt.raw.t_o);
    // x_s * sqrt(i_es) recombines the channels
    if (!pt.deg_p && !pt.deg_o && !pt.deg_s) {
      CHECK(close(pt.x_s * std::sqrt(pt.var.i_es),
                  pt.x_p * std::sqrt(pt.var.i_ep) + pt.x_o * std::sqrt(pt.var.i_eo), 1e-10));
    }
    CHECK(pt.var.i_ep >= 0.0);
    CHECK(pt.var.i_eo >= 0.0);
  }
}

TEST_CASE("sup_statistics") {
  auto point = [](double g1, double x_p, double x_o, double x_s) {
    ProfilePoint pt;
    pt.gamma = {g1, 0.0};
    pt.x_p = x_p;
    pt.x_o = x_o;
    pt.x_s = x_s;
    return pt;
  };

  SUBCASE("all negative: statistic 0, first point as argmax") {
    ScoreProfile profile;
    profile.points = {point(0.1, -1, -2, -0.5), point(0.2, -3, -1, -0.7)};
    SupStatistics s = sup_statistics(profile);
    CHECK(s.s_p == 0.0);
    CHECK(s.s_o == 0.0);
    CHECK(s.s_s == 0.0);
    CHECK(s.argmax_s.gamma1 == 0.1);
  }

  SUBCASE("first maximizer wins ties") {
    ScoreProfile profile;
    profile.points = {point(0.1, 0, 0, -1), point(0.2, 0, 0, 2), point(0.3, 0, 0, 2)};
    SupStatistics s = sup_statistics(profile);
    CHECK(s.s_s == 4.0);
    CHECK(s.argmax_s.gamma1 == 0.2);
  }

  SUBCASE("single point squares the one-sided value") {
    ScoreProfile profile;
    profile.points = {point(0.5, 0.0, 1.5, 0.0)};
    SupStatistics s = sup_statistics(profile);
    CHECK(s.s_o == 2.25);
    CHECK(s.argmax_o.gamma1 == 0.5);
  }
}

TEST_CASE("scale equivariance: rescaling z leaves standardized statistics unchanged") {
  std::mt19937_64 rng(77);
  Dataset d = gaussian_fixture(rng);
  NullFit fit = fit_null(d, FamilySpec::gaussian());
  NuisanceGrid grid = make_grid({4, 3, 0.9});
  ScoreProfile base = compute_profile(d, FamilySpec::gaussian(), fit, grid);

  const double c = 3.7;
  Dataset scaled = d;
  for (auto& cluster : scaled.clusters)
    for (auto& o : cluster.obs) o.z *= c;
  ScoreProfile rescaled = compute_profile(scaled, FamilySpec::gaussian(), fit, grid);

  const double c2 = c * c, c4 = c2 * c2;
  for (std::size_t g = 0; g < base.points.size(); ++g) {
    CHECK(close(rescaled.points[g].raw.t_p, c2 * base.points[g].raw.t_p, 1e-10));
    CHECK(close(rescaled.points[g].var.i_ep, c4 * base.points[g].var.i_ep, 1e-10));
    CHECK(close(rescaled.points[g].var.i_eo, c4 * base.points[g].var.i_eo, 1e-10));
    CHECK(close(rescaled.points[g].x_p, base.points[g].x_p, 1e-10));
    CHECK(close(rescaled.points[g].x_o, base.points[g].x_o, 1e-10));
    CHECK(close(rescaled.points[g].x_s, base.points[g].x_s, 1e-10));
  }
  CHECK(close(sup_statistics(rescaled).s_s, sup_statistics(base).s_s, 1e-10));
}

TEST_CASE("cluster additivity of t and uncorrected variances") {
  std::mt19937_64 rng(5);
  Dataset d = gaussian_fixture(rng, 4, 3);
  NullFit fit = fit_null(d, FamilySpec::gaussian());
  WMatrix w = w_matrix_q2({1.3, -0.6});
  BlockCoefficients blocks = build_blocks(d, w);
  const ScoreContext ctx(d, FamilySpec::gaussian(), fit);

  RawStatistics full = raw_statistics(ctx.u(), ctx.v(), blocks);
  VarianceComponents full_vc = ctx.variance_components(blocks);

  double tp = 0.0, to = 0.0, iep = 0.0, ito = 0.0;
  for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
    BlockCoefficients only;
    only.blocks = blocks.blocks;
    for (std::size_t j = 0; j < only.blocks.size(); ++j)
      if (j != i) only.blocks[j].setZero();
    RawStatistics r = raw_statistics(ctx.u(), ctx.v(), only);
    VarianceComponents vc = ctx.variance_components(only);
    tp += r.t_p;
    to += r.t_o;
    iep += vc.i_ep;
    ito += vc.i_to;
  }
  CHECK(close(tp, full.t_p, 1e-12));
  CHECK(close(to, full.t_o, 1e-12));
  CHECK(close(iep, full_vc.i_ep, 1e-12));
  CHECK(close(ito, full_vc.i_to, 1e-12));
}

TEST_CASE("sup statistics grow with grid refinement") {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 5; ++trial) {
    Dataset d = gaussian_fixture(rng);
    NullFit fit = fit_null(d, FamilySpec::gaussian());
    // gamma1 points of (5, 3) are a subset of (10, 3)
    SupStatistics coarse =
        sup_statistics(compute_profile(d, FamilySpec::gaussian(), fit, make_grid({5, 3, 0.9})));
    SupStatistics fine =
        sup_statistics(compute_profile(d, FamilySpec::gaussian(), fit, make_grid({10, 3, 0.9})));
    CHECK(fine.s_o >= coarse.s_o - 1e-12);
    CHECK(fine.s_p >= coarse.s_p - 1e-12);
    CHECK(fine.s_s >= coarse.s_s - 1e-12);
  }
}

TEST_CASE("gaussian two-observation closed form for x_p") {
  // single cluster of two: x_p = sign(b12) * phi * e1 * e2
  Dataset d = dataset({{obs(1.4, {1}, {1, 0.5}), obs(-0.3, {1}, {1, -0.2})}});
  NullFit fit = fit_null(d, FamilySpec::gaussian());
  GammaPoint g{0.9, 0.4};
  NuisanceGrid grid;
  grid.points = {g};
  grid.spec = {1, 1, 0.5};
  ScoreProfile profile = compute_profile(d, FamilySpec::gaussian(), fit, grid);

  const WMatrix w = w_matrix_q2(g);
  const double b12 = d.clusters[0].obs[0].z.dot(w * d.clusters[0].obs[1].z);
  const double e1 = d.clusters[0].obs[0].y - fit.mu(0);
  const double e2 = d.clusters[0].obs[1].y - fit.mu(1);
  const double expected = (b12 >= 0 ? 1.0 : -1.0) * fit.phi * e1 * e2;
  CHECK(close(profile.points[0].x_p, expected, 1e-10));
}
