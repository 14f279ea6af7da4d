#include "homscore/covparam.hpp"

#include <cmath>

#include "homscore/errors.hpp"

namespace homscore {

WMatrix w_matrix_q2(const GammaPoint& g) {
  const double pi = 3.14159265358979323846;
  if (!(g.gamma1 > 0.0 && g.gamma1 <= pi))
    throw ConfigError("gamma1 must lie in (0, pi]");
  if (std::abs(g.gamma2) > 1.0)
    throw ConfigError("|gamma2| > 1 breaks positive semidefiniteness");
  const double c = std::cos(g.gamma1);
  const double s = std::sin(g.gamma1);
  const double c2 = c * c;
  const double off = g.gamma2 * s * c;
  WMatrix w(2, 2);
  w << c2, off, off, 1.0 - c2;  // trace pinned to one
  return w;
}

WMatrix w_matrix_cholesky(const std::vector<double>& lambda_angles,
                          const Eigen::MatrixXd& gamma_lower) {
  const int q = static_cast<int>(lambda_angles.size()) + 1;
  if (gamma_lower.rows() != q || gamma_lower.cols() != q)
    throw ConfigError("gamma_lower must be q x q with q = angles + 1");

  // Spherical coordinates on the positive orthant: sum of squares is one.
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(q);
  for (int i = 0; i < q - 1; ++i) {
    const double a = lambda_angles[static_cast<std::size_t>(i)];
    for (int j = i; j < q; ++j) lambda(j) *= (j == i) ? std::cos(a) : std::sin(a);
  }

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(q, q);
  for (int i = 1; i < q; ++i)
    for (int j = 0; j < i; ++j) gamma(i, j) = gamma_lower(i, j);

  Eigen::MatrixXd lg = lambda.asDiagonal() * gamma;
  return lg * lg.transpose();
}

NuisanceGrid make_grid(const GridSpec& spec) {
  const double pi = 3.14159265358979323846;
  if (spec.n1 < 1) throw ConfigError("grid: n1 must be >= 1");
  if (spec.n2 < 1 || spec.n2 % 2 == 0)
    throw ConfigError("grid: n2 must be odd so gamma2 = 0 is included");
  if (!(spec.delta0 > 0.0 && spec.delta0 < 1.0))
    throw ConfigError("grid: delta0 must lie in (0, 1)");

  NuisanceGrid grid;
  grid.spec = spec;
  grid.points.reserve(static_cast<std::size_t>(spec.n1) * spec.n2);
  const int half = (spec.n2 - 1) / 2;
  for (int i = 1; i <= spec.n1; ++i) {
    const double g1 = pi * static_cast<double>(i) / spec.n1;
    for (int j = -half; j <= half; ++j) {
      const double g2 = half == 0 ? 0.0 : spec.delta0 * static_cast<double>(j) / half;
      grid.points.push_back({g1, g2});
    }
  }
  return grid;
}

BlockCoefficients build_blocks(const Dataset& data, const WMatrix& w) {
  const int q = static_cast<int>(w.rows());
  BlockCoefficients out;
  out.blocks.reserve(data.clusters.size());
  for (const auto& cluster : data.clusters) {
    const int m = static_cast<int>(cluster.obs.size());
    Eigen::MatrixXd block(m, m);
    for (int j = 0; j < m; ++j) {
      const auto& zj = cluster.obs[static_cast<std::size_t>(j)].z;
      if (zj.size() != q)
        throw DataError("z dimension " + std::to_string(zj.size()) +
                        " does not match W dimension " + std::to_string(q));
      for (int k = 0; k <= j; ++k) {
        const auto& zk = cluster.obs[static_cast<std::size_t>(k)].z;
        // accumulate over the packed lower triangle of W; the summand is
        // symmetric in (j, k) term by term, so the value depends only on
        // the unordered pair of rows
        double b = 0.0;
        for (int a = 0; a < q; ++a) {
          b += w(a, a) * (zj(a) * zk(a));
          for (int c = a + 1; c < q; ++c) b += w(c, a) * (zj(a) * zk(c) + zj(c) * zk(a));
        }
        block(j, k) = b;
        block(k, j) = b;
      }
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

}  // namespace homscore
