#include "mllcm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include "mllcm/error.hpp"

namespace mllcm {

namespace {

constexpr double kDegeneracyTol = 1e-10;
constexpr double kSymmetryTol = 1e-8;

double scale_of(const Matrix& m) {
  return m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

void normalize_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

TruncatedSVD full_svd(const Matrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "empty matrix");
  require(m.allFinite(), "matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSVD out;
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.b = svd.matrixV();
  // Sign of each triplet is fixed by u; b follows so u * sigma * b' is unchanged.
  for (Eigen::Index c = 0; c < out.u.cols(); ++c) {
    Eigen::Index arg = 0;
    out.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, c) < 0.0) {
      out.u.col(c) *= -1.0;
      out.b.col(c) *= -1.0;
    }
  }
  return out;
}

TruncatedEigen full_eigen_by_magnitude(const Matrix& m) {
  require(m.rows() > 0 && m.rows() == m.cols(), "matrix must be square and nonempty");
  require(m.allFinite(), "matrix has non-finite entries");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale_of(m),
          "matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  require(es.info() == Eigen::Success, "eigendecomposition did not converge");
  const auto n = m.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Vector& vals = es.eigenvalues();
  // Solver output is ascending; stable sort by magnitude keeps positive
  // eigenvalues ahead of negatives of the same size.
  std::reverse(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(vals(a)) > std::abs(vals(b));
  });
  TruncatedEigen out;
  out.v.resize(n, n);
  out.lambda.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.v.col(c) = es.eigenvectors().col(order[c]);
    out.lambda(c) = vals(order[c]);
  }
  normalize_signs(out.v);
  return out;
}

TruncatedSVD truncate(const TruncatedSVD& full, int k) {
  const auto avail = full.sigma.size();
  require(k >= 1 && k <= avail, "rank k out of range");
  TruncatedSVD out;
  out.u = full.u.leftCols(k);
  out.sigma = full.sigma.head(k);
  out.b = full.b.leftCols(k);
  out.next_sigma = k < avail ? full.sigma(k) : 0.0;
  if (k < avail && full.sigma(k - 1) - full.sigma(k) <= kDegeneracyTol * std::max(1.0, full.sigma(0))) {
    std::ostringstream msg;
    msg << "degenerate spectrum: sigma_" << k << " ~ sigma_" << k + 1 << " (" << full.sigma(k - 1)
        << ")";
    out.warnings.push_back(msg.str());
  }
  return out;
}

TruncatedEigen truncate(const TruncatedEigen& full, int k) {
  const auto avail = full.lambda.size();
  require(k >= 1 && k <= avail, "rank k out of range");
  TruncatedEigen out;
  out.v = full.v.leftCols(k);
  out.lambda = full.lambda.head(k);
  out.next_magnitude = k < avail ? std::abs(full.lambda(k)) : 0.0;
  const double top = std::max(1.0, std::abs(full.lambda(0)));
  if (k < avail && std::abs(full.lambda(k - 1)) - std::abs(full.lambda(k)) <= kDegeneracyTol * top) {
    std::ostringstream msg;
    msg << "degenerate spectrum: |lambda_" << k << "| ~ |lambda_" << k + 1 << "| ("
        << std::abs(full.lambda(k - 1)) << ")";
    out.warnings.push_back(msg.str());
  }
  return out;
}

TruncatedSVD top_k_svd(const Matrix& m, int k) {
  require(k >= 1 && k <= std::min(m.rows(), m.cols()), "rank k out of range");
  return truncate(full_svd(m), k);
}

TruncatedEigen top_k_eigen_by_magnitude(const Matrix& m, int k) {
  require(k >= 1 && k <= m.rows(), "rank k out of range");
  return truncate(full_eigen_by_magnitude(m), k);
}

}  // namespace mllcm
