#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homscore/covparam.hpp"
#include "homscore/dataset.hpp"
#include "homscore/expfam.hpp"

namespace homscore {

// Full result of one homogeneity test run; serializes losslessly to JSON.
struct TestReport {
  std::string family;
  int trials = 1;
  int n = 0;             // clusters
  long long n_total = 0; // observations
  std::vector<double> beta_hat;
  double phi_hat = 1.0;  // error variance sigma^2 for gaussian, 1 otherwise
  GridSpec grid;
  int r0 = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;

  double s_o = 0.0, s_p = 0.0, s_s = 0.0;
  GammaPoint argmax_o, argmax_p, argmax_s;
  double p_o = 1.0, p_p = 1.0, p_s = 1.0;
  bool reject_o = false, reject_p = false, reject_s = false;

  int degenerate_grid_points = 0;
  int ieo_floored = 0;
  std::vector<std::string> warnings;
};

bool operator==(const TestReport& a, const TestReport& b);

// Fit the null model, profile the grid, resample and compute p-values.
TestReport run_test(const Dataset& data, const FamilySpec& family, const GridSpec& grid,
                    int r0, std::uint64_t seed, double alpha, int threads = 0);

}  // namespace homscore
