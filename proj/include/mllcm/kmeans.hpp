#pragma once

#include "mllcm/model.hpp"
#include "mllcm/rng.hpp"

namespace mllcm {

struct KMeansConfig {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-9;
};

struct KMeansResult {
  Partition labels;
  Matrix centers;  // k x dim
  double inertia = 0.0;
  int iterations = 0;
  int restarts_used = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `cfg.restarts` runs by
/// inertia. Output never has an empty cluster. Ties in nearest-center
/// assignment go to the lowest center index.
KMeansResult kmeans(const Matrix& points, int k, Rng& rng, const KMeansConfig& cfg = {});

/// A single seeded Lloyd run; exposed for tests comparing against restarts.
KMeansResult kmeans_single_run(const Matrix& points, int k, Rng& rng, const KMeansConfig& cfg);

}  // namespace mllcm
