#include "mllcm/kmeans.hpp"

#include <limits>
#include <vector>

#include "mllcm/error.hpp"

namespace mllcm {

namespace {

double sq_dist(const Matrix& points, Eigen::Index i, const Matrix& centers, Eigen::Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

// k-means++ seeding: first center uniform, the rest drawn with probability
// proportional to squared distance from the nearest chosen center.
Matrix seed_centers(const Matrix& points, int k, Rng& rng) {
  const auto n = points.rows();
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(n)));
  std::vector<double> nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest[i] = sq_dist(points, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform_open() * total;
      double cum = 0.0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += nearest[i];
        if (cum > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        // Rounding pushed target past the final sum; take the last positive weight.
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All points coincide with chosen centers.
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], sq_dist(points, i, centers, c));
  }
  return centers;
}

double assign(const Matrix& points, const Matrix& centers, std::vector<int>& labels,
              std::vector<double>& dists) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = sq_dist(points, i, centers, 0);
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d = sq_dist(points, i, centers, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dists[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

// Moves the point farthest from its center into each empty cluster. Only
// points whose cluster keeps at least one other member are eligible.
bool refill_empty(const Matrix& points, Matrix& centers, std::vector<int>& labels,
                  std::vector<double>& dists) {
  const int k = static_cast<int>(centers.rows());
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  bool changed = false;
  for (int c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (sizes[labels[i]] > 1 && dists[i] > far_d) {
        far_d = dists[i];
        far = i;
      }
    }
    if (far < 0) return changed;
    --sizes[labels[far]];
    labels[far] = c;
    ++sizes[c];
    dists[far] = 0.0;
    centers.row(c) = points.row(far);
    changed = true;
  }
  return changed;
}

void update_centers(const Matrix& points, const std::vector<int>& labels, Matrix& centers) {
  const auto k = centers.rows();
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
  }
}

double recompute_inertia(const Matrix& points, const Matrix& centers,
                         const std::vector<int>& labels) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) inertia += sq_dist(points, i, centers, labels[i]);
  return inertia;
}

void check_inputs(const Matrix& points, int k) {
  require(k >= 1, "k must be positive");
  require(points.rows() >= k, "fewer points than clusters");
  require(points.cols() >= 1, "points have no coordinates");
  require(points.allFinite(), "points have non-finite coordinates");
}

}  // namespace

KMeansResult kmeans_single_run(const Matrix& points, int k, Rng& rng, const KMeansConfig& cfg) {
  check_inputs(points, k);
  require(cfg.max_iters >= 1, "max_iters must be positive");
  const auto n = points.rows();
  Matrix centers = seed_centers(points, k, rng);
  std::vector<int> labels(n, 0);
  std::vector<double> dists(n, 0.0);
  assign(points, centers, labels, dists);
  refill_empty(points, centers, labels, dists);

  int iter = 0;
  while (iter < cfg.max_iters) {
    ++iter;
    Matrix previous = centers;
    update_centers(points, labels, centers);
    assign(points, centers, labels, dists);
    const bool refilled = refill_empty(points, centers, labels, dists);
    const double movement = (centers - previous).rowwise().norm().maxCoeff();
    if (!refilled && movement < cfg.tol) break;
  }
  // Final centers are the means of the final assignment.
  update_centers(points, labels, centers);

  KMeansResult res;
  res.inertia = recompute_inertia(points, centers, labels);
  res.labels = Partition(std::move(labels), k);
  res.centers = std::move(centers);
  res.iterations = iter;
  res.restarts_used = 1;
  return res;
}

KMeansResult kmeans(const Matrix& points, int k, Rng& rng, const KMeansConfig& cfg) {
  check_inputs(points, k);
  require(cfg.restarts >= 1, "restarts must be positive");
  // Restart seeds are drawn up front so each run has its own stream.
  std::vector<std::uint64_t> seeds(cfg.restarts);
  for (auto& s : seeds) s = rng.next_u64();
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng run_rng(seeds[r]);
    KMeansResult run = kmeans_single_run(points, k, run_rng, cfg);
    // Strict comparison keeps the earliest restart on ties.
    if (run.inertia < best.inertia) best = std::move(run);
  }
  best.restarts_used = cfg.restarts;
  return best;
}

}  // namespace mllcm
