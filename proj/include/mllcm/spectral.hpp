#pragma once

#include <string>
#include <vector>

#include "mllcm/model.hpp"

namespace mllcm {

/// Leading singular triplets: m ~ u * diag(sigma) * b'.
struct TruncatedSVD {
  Matrix u;      // N x k, orthonormal columns
  Vector sigma;  // nonincreasing
  Matrix b;      // J x k, orthonormal columns
  /// sigma_{k+1}, or 0 when k == min(N, J).
  double next_sigma = 0.0;
  std::vector<std::string> warnings;
};

/// Eigenpairs of largest magnitude of a symmetric matrix.
struct TruncatedEigen {
  Matrix v;       // N x k, orthonormal columns
  Vector lambda;  // ordered by decreasing |lambda|
  /// |lambda_{k+1}|, or 0 when k == N.
  double next_magnitude = 0.0;
  std::vector<std::string> warnings;
};

/// Full singular value decomposition with singular vectors sign-normalized
/// (largest-magnitude entry positive, ties to the lowest index).
TruncatedSVD full_svd(const Matrix& m);

/// Full eigendecomposition sorted by decreasing |lambda|, sign-normalized.
/// Throws if `m` is not symmetric within 1e-8 (relative to its largest entry).
TruncatedEigen full_eigen_by_magnitude(const Matrix& m);

TruncatedSVD top_k_svd(const Matrix& m, int k);
TruncatedEigen top_k_eigen_by_magnitude(const Matrix& m, int k);

/// Keep the first k components of a full decomposition. Emits a degeneracy
/// warning when the k-th and (k+1)-th values coincide within 1e-10.
TruncatedSVD truncate(const TruncatedSVD& full, int k);
TruncatedEigen truncate(const TruncatedEigen& full, int k);

/// Flip the sign of each column so its largest-magnitude entry is positive.
void normalize_signs(Matrix& vectors);

}  // namespace mllcm
