// Independent reference computations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "mllcm/model.hpp"

namespace oracle {

using mllcm::Matrix;
using mllcm::Vector;

// Clustering error straight from its set definition, every permutation tried.
inline double clustering_error(const std::vector<int>& truth, const std::vector<int>& est, int k) {
  const int n = static_cast<int>(truth.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int c = 0; c < k; ++c) {
      int missed = 0, extra = 0, size = 0;
      for (int i = 0; i < n; ++i) {
        const bool in_true = truth[i] == c;
        const bool in_est = est[i] == perm[c];
        size += in_true;
        missed += in_true && !in_est;
        extra += !in_true && in_est;
      }
      worst = std::max(worst, static_cast<double>(missed + extra) / size);
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double hamming_error(const std::vector<int>& truth, const std::vector<int>& est, int k) {
  const int n = static_cast<int>(truth.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  int best = n;
  do {
    int wrong = 0;
    for (int i = 0; i < n; ++i) wrong += perm[est[i]] != truth[i];
    best = std::min(best, wrong);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / n;
}

// Cyclic Jacobi rotations; returns eigenvalues in ascending order.
inline Vector jacobi_eigenvalues(Matrix a) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector d = a.diagonal();
  std::sort(d.data(), d.data() + d.size());
  return d;
}

// Singular values as square roots of the Jacobi eigenvalues of m'm, descending.
inline Vector singular_values(const Matrix& m) {
  Vector ev = jacobi_eigenvalues(m.transpose() * m);
  Vector sv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) sv(i) = std::sqrt(std::max(0.0, ev(ev.size() - 1 - i)));
  return sv;
}

// Textbook Newman-Girvan modularity of one weighted graph, pair by pair.
inline double newman_girvan(const Matrix& a, const std::vector<int>& labels) {
  const auto n = a.rows();
  double m2 = 0.0;
  std::vector<double> k(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      k[i] += a(i, j);
      m2 += a(i, j);
    }
  double q = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (labels[i] == labels[j]) q += a(i, j) - k[i] * k[j] / m2;
  return q / m2;
}

inline double log_binom_pmf(int n, int k, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

// P(lo <= Binomial(n, p) <= hi) by summing the pmf.
inline double binom_interval(int n, double p, int lo, int hi) {
  double s = 0.0;
  for (int k = lo; k <= hi; ++k) s += std::exp(log_binom_pmf(n, k, p));
  return s;
}

// Naive Z * Theta' with an explicit one-hot Z and triple loop.
inline Matrix population(const mllcm::Partition& z, const Matrix& theta) {
  const Matrix zz = z.indicator();
  Matrix out = Matrix::Zero(zz.rows(), theta.rows());
  for (Eigen::Index i = 0; i < zz.rows(); ++i)
    for (Eigen::Index j = 0; j < theta.rows(); ++j)
      for (Eigen::Index c = 0; c < zz.cols(); ++c) out(i, j) += zz(i, c) * theta(j, c);
  return out;
}

}  // namespace oracle
