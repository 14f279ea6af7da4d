#pragma once

#include <Eigen/Core>
#include <vector>

#include "homscore/dataset.hpp"

namespace homscore {

// Nuisance parameter of the normalized random-effect covariance W(gamma):
// gamma1 in (0, pi] is the variance-split angle, gamma2 in [-delta0, delta0]
// the correlation coordinate.
struct GammaPoint {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

using WMatrix = Eigen::MatrixXd;

struct GridSpec {
  int n1 = 20;             // points over gamma1
  int n2 = 31;             // points over gamma2, odd so gamma2 = 0 is included
  double delta0 = 15.0 / 16.0;
};

// Finite grid over (gamma1, gamma2), row-major (gamma1 outer, gamma2 inner)
// so that "first maximizer wins" is a deterministic tie-break.
struct NuisanceGrid {
  std::vector<GammaPoint> points;
  GridSpec spec;

  std::size_t size() const { return points.size(); }
};

// q = 2 trace-one form:
//   [ cos^2(g1)            g2 sin(g1) cos(g1) ]
//   [ g2 sin(g1) cos(g1)   sin^2(g1)          ]
// Accepts |gamma2| <= 1 (the boundary is exactly rank one).
WMatrix w_matrix_q2(const GammaPoint& g);

// General-q form W = Lambda * Gamma * Gamma^T * Lambda, where Lambda is the
// diagonal of a unit vector on the positive orthant of the sphere
// (parameterized by q-1 spherical angles, so tr(Lambda^2) = 1) and Gamma is
// lower triangular with unit diagonal. gamma_lower supplies the strictly
// lower triangle.
WMatrix w_matrix_cholesky(const std::vector<double>& lambda_angles,
                          const Eigen::MatrixXd& gamma_lower);

NuisanceGrid make_grid(const GridSpec& spec);

// Quadratic-form coefficients b_{K,K'} = z_K^T W z_K', stored as one dense
// symmetric block per cluster; cross-cluster coefficients are identically
// zero and never materialize.
struct BlockCoefficients {
  std::vector<Eigen::MatrixXd> blocks;
};

BlockCoefficients build_blocks(const Dataset& data, const WMatrix& w);

}  // namespace homscore
