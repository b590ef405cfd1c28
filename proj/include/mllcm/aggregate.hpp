#pragma once

#include <string>
#include <vector>

#include "mllcm/model.hpp"

namespace mllcm {

/// The three aggregation matrices the spectral estimators work on.
struct AggregationBundle {
  Matrix r_sum;           // N x J, sum of R_l
  Matrix s_sum;           // N x N, sum of R_l R_l'
  Matrix s_sum_debiased;  // N x N, sum of (R_l R_l' - D_l), D_l(i,i) = sum_j R_l(i,j)^2
};

AggregationBundle build_aggregates(const ResponseTensor& r);

/// Per-layer weighted graphs A_l = R_l R_l' with degrees and half total weight.
struct ModularityIngredients {
  std::vector<Matrix> a;
  std::vector<Vector> degrees;
  std::vector<double> omegas;
  /// Layers whose responses are all zero (omega_l == 0).
  std::vector<int> empty_layers;
};

ModularityIngredients build_modularity_ingredients(const ResponseTensor& r);

}  // namespace mllcm
