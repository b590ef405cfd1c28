#pragma once

#include <optional>
#include <vector>

#include "mllcm/model.hpp"

namespace mllcm {

/// Largest K for which permutation-minimized metrics are computed exactly.
inline constexpr int kMaxPermutationClasses = 8;

/// K x K counts: table[t][e] = |true class t  and  estimated class e|.
std::vector<std::vector<int>> contingency(const Partition& truth, const Partition& est);

/// Worst-class misassignment rate, minimized over label permutations. Each
/// class term is normalized by the size of its true class.
double clustering_error(const Partition& truth, const Partition& est);

/// The permutation attaining clustering_error: perm[t] is the estimated class
/// matched with true class t. Ties resolve to the lexicographically first.
std::vector<int> best_permutation(const Partition& truth, const Partition& est);

/// Fraction of subjects misassigned under the best label permutation.
double hamming_error(const Partition& truth, const Partition& est);

/// 2 I(truth; est) / (H(truth) + H(est)), natural logs; 1 when both are single-class.
double nmi(const Partition& truth, const Partition& est);

/// Hubert-Arabie adjusted Rand index; 1 for equivalent degenerate partitions.
double ari(const Partition& truth, const Partition& est);

/// ||sum_l (Theta_hat_l[:, perm] - Theta_l)||_F / ||sum_l Theta_l||_F.
double relative_l2_error(const std::vector<Matrix>& theta_true, const std::vector<Matrix>& theta_hat,
                         const std::vector<int>& perm);

/// Fraction of selected class counts equal to `k_true`.
double accuracy_rate(const std::vector<int>& k_hats, int k_true);

struct MetricReport {
  double clustering_error = 0.0;
  double hamming_error = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  std::optional<double> relative_l2_error;
};

MetricReport score(const Partition& truth, const Partition& est,
                   const std::vector<Matrix>* theta_true = nullptr,
                   const std::vector<Matrix>* theta_hat = nullptr);

}  // namespace mllcm
