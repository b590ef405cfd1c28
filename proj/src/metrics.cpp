#include "mllcm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mllcm/error.hpp"

namespace mllcm {

namespace {

void check_same_shape(const Partition& truth, const Partition& est) {
  require(truth.n_subjects() == est.n_subjects(), "partitions differ in N");
  require(truth.n_subjects() > 0, "empty partition");
  require(truth.n_classes() == est.n_classes(), "partitions differ in K");
  if (truth.n_classes() > kMaxPermutationClasses) {
    throw UnsupportedSize("exact permutation search supports K <= 8");
  }
}

std::vector<std::vector<int>> table(const Partition& truth, const Partition& est) {
  std::vector<std::vector<int>> t(truth.n_classes(), std::vector<int>(est.n_classes(), 0));
  for (int i = 0; i < truth.n_subjects(); ++i) ++t[truth[i]][est[i]];
  return t;
}

// Worst class term of the clustering error for one permutation.
double worst_class_error(const std::vector<std::vector<int>>& t, const std::vector<int>& true_sizes,
                         const std::vector<int>& est_sizes, const std::vector<int>& perm) {
  double worst = 0.0;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const int both = t[k][perm[k]];
    const int missed = true_sizes[k] - both;
    const int extra = est_sizes[perm[k]] - both;
    worst = std::max(worst, static_cast<double>(missed + extra) / true_sizes[k]);
  }
  return worst;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

std::vector<std::vector<int>> contingency(const Partition& truth, const Partition& est) {
  require(truth.n_subjects() == est.n_subjects(), "partitions differ in N");
  return table(truth, est);
}

std::vector<int> best_permutation(const Partition& truth, const Partition& est) {
  check_same_shape(truth, est);
  const auto t = table(truth, est);
  const auto true_sizes = truth.class_sizes();
  const auto est_sizes = est.class_sizes();
  for (int s : true_sizes) require(s > 0, "true partition has an empty class");
  std::vector<int> perm(truth.n_classes());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_err = std::numeric_limits<double>::infinity();
  do {
    const double err = worst_class_error(t, true_sizes, est_sizes, perm);
    if (err < best_err) {
      best_err = err;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double clustering_error(const Partition& truth, const Partition& est) {
  const auto perm = best_permutation(truth, est);
  return worst_class_error(table(truth, est), truth.class_sizes(), est.class_sizes(), perm);
}

double hamming_error(const Partition& truth, const Partition& est) {
  check_same_shape(truth, est);
  const auto t = table(truth, est);
  std::vector<int> perm(truth.n_classes());
  std::iota(perm.begin(), perm.end(), 0);
  int best_matched = -1;
  do {
    int matched = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) matched += t[k][perm[k]];
    best_matched = std::max(best_matched, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(truth.n_subjects() - best_matched) / truth.n_subjects();
}

double nmi(const Partition& truth, const Partition& est) {
  require(truth.n_subjects() == est.n_subjects() && truth.n_subjects() > 0,
          "partitions differ in N");
  const auto t = table(truth, est);
  const double n = truth.n_subjects();
  std::vector<double> rows(truth.n_classes(), 0.0), cols(est.n_classes(), 0.0);
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t[a].size(); ++b) {
      rows[a] += t[a][b];
      cols[b] += t[a][b];
    }
  const double h_true = entropy(rows, n);
  const double h_est = entropy(cols, n);
  if (h_true + h_est == 0.0) return 1.0;
  // Equal up to relabeling: every occupied row and column has one nonzero cell.
  bool matched = true;
  for (std::size_t a = 0; a < t.size() && matched; ++a)
    for (std::size_t b = 0; b < t[a].size(); ++b)
      if (t[a][b] != 0 && (t[a][b] != rows[a] || t[a][b] != cols[b])) matched = false;
  if (matched) return 1.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t[a].size(); ++b) {
      if (t[a][b] == 0) continue;
      // Counts are integers, so numerator and denominator are exact.
      mi += (t[a][b] / n) * std::log(t[a][b] * n / (rows[a] * cols[b]));
    }
  return std::clamp(2.0 * mi / (h_true + h_est), 0.0, 1.0);
}

double ari(const Partition& truth, const Partition& est) {
  require(truth.n_subjects() == est.n_subjects() && truth.n_subjects() > 0,
          "partitions differ in N");
  const auto t = table(truth, est);
  const double n = truth.n_subjects();
  std::vector<double> rows(truth.n_classes(), 0.0), cols(est.n_classes(), 0.0);
  double index = 0.0;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t[a].size(); ++b) {
      rows[a] += t[a][b];
      cols[b] += t[a][b];
      index += choose2(t[a][b]);
    }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (double r : rows) sum_rows += choose2(r);
  for (double c : cols) sum_cols += choose2(c);
  const double total = choose2(n);
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Zero denominator only when both partitions are all-in-one or all-singletons.
  if (max_index - expected == 0.0) return 1.0;
  return (index - expected) / (max_index - expected);
}

double relative_l2_error(const std::vector<Matrix>& theta_true, const std::vector<Matrix>& theta_hat,
                         const std::vector<int>& perm) {
  require(!theta_true.empty() && theta_true.size() == theta_hat.size(), "layer counts differ");
  const auto j = theta_true.front().rows();
  const auto k = theta_true.front().cols();
  require(static_cast<Eigen::Index>(perm.size()) == k, "permutation length differs from K");
  Matrix sum_true = Matrix::Zero(j, k);
  Matrix sum_diff = Matrix::Zero(j, k);
  for (std::size_t l = 0; l < theta_true.size(); ++l) {
    require(theta_true[l].rows() == j && theta_true[l].cols() == k && theta_hat[l].rows() == j &&
                theta_hat[l].cols() == k,
            "item parameter shapes differ");
    for (Eigen::Index c = 0; c < k; ++c) {
      sum_diff.col(c) += theta_hat[l].col(perm[c]) - theta_true[l].col(c);
    }
    sum_true += theta_true[l];
  }
  const double denom = sum_true.norm();
  require(denom > 0.0, "relative error undefined for all-zero item parameters");
  return sum_diff.norm() / denom;
}

double accuracy_rate(const std::vector<int>& k_hats, int k_true) {
  require(!k_hats.empty(), "no selections to score");
  const auto hits = std::count(k_hats.begin(), k_hats.end(), k_true);
  return static_cast<double>(hits) / static_cast<double>(k_hats.size());
}

MetricReport score(const Partition& truth, const Partition& est,
                   const std::vector<Matrix>* theta_true, const std::vector<Matrix>* theta_hat) {
  MetricReport rep;
  rep.clustering_error = clustering_error(truth, est);
  rep.hamming_error = hamming_error(truth, est);
  rep.nmi = nmi(truth, est);
  rep.ari = ari(truth, est);
  if (theta_true && theta_hat) {
    rep.relative_l2_error = relative_l2_error(*theta_true, *theta_hat, best_permutation(truth, est));
  }
  return rep;
}

}  // namespace mllcm
