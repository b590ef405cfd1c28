#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mllcm/aggregate.hpp"
#include "mllcm/estimators.hpp"

namespace mllcm {

/// Layer-averaged Newman-Girvan modularity of `z_hat` over the graphs
/// A_l = R_l R_l'. The pair sum includes self-pairs. Layers with zero total
/// weight are left out of the average; `skipped_layers` receives them.
double averaged_modularity(const ModularityIngredients& ing, const Partition& z_hat,
                           std::vector<int>* skipped_layers = nullptr);

struct ModularityCurve {
  Method method = Method::DSoG;
  std::vector<int> k_values;
  /// nullopt where the estimator failed for that k.
  std::vector<std::optional<double>> q_values;
  int k_star = 0;
  std::vector<std::string> warnings;
};

/// Fits `method` for every k in [k_min, k_max] and picks the k with the
/// largest averaged modularity (smallest k on ties).
ModularityCurve select_k(const ResponseTensor& r, Method method, int k_min, int k_max, Rng& rng,
                         const KMeansConfig& cfg = {});

/// Same, reusing an estimator's cached decomposition and precomputed graphs.
ModularityCurve select_k(const Estimator& est, const ModularityIngredients& ing, int k_min,
                         int k_max, Rng& rng, const KMeansConfig& cfg = {});

}  // namespace mllcm
