#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mllcm/rng.hpp"

namespace mllcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dimensions of a multi-layer latent class model.
struct ModelParams {
  int n_subjects = 0;  // N
  int n_items = 0;     // J
  int n_classes = 0;   // K
  int n_layers = 0;    // L
  int max_level = 0;   // M, responses live in {0,...,M}
  double rho = 0.0;    // sparsity: largest item parameter

  /// Throws InvalidArgument unless K <= min(N, J) and 0 < rho <= M.
  void validate() const;
};

/// Subject-to-class assignment. Labels are 0-based internally.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<int> labels, int n_classes);

  /// Build from 1-based labels; the class count is the largest label.
  static Partition from_one_based(const std::vector<int>& labels);

  int n_subjects() const { return static_cast<int>(labels_.size()); }
  int n_classes() const { return n_classes_; }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](std::size_t i) const { return labels_[i]; }

  std::vector<int> class_sizes() const;
  bool all_classes_nonempty() const;
  std::vector<int> one_based() const;

  /// N x K one-hot classification matrix.
  Matrix indicator() const;

 private:
  std::vector<int> labels_;
  int n_classes_ = 0;
};

/// L item parameter matrices, each J x K.
struct ItemParameterSet {
  std::vector<Matrix> thetas;

  int n_layers() const { return static_cast<int>(thetas.size()); }
  int n_items() const { return thetas.empty() ? 0 : static_cast<int>(thetas.front().rows()); }
  int n_classes() const { return thetas.empty() ? 0 : static_cast<int>(thetas.front().cols()); }

  /// Entries in [0, max_level], at least one layer, shared shape.
  void validate(int max_level) const;
};

/// L observed N x J response matrices.
///
/// Entries are stored as doubles so population matrices can be passed to the
/// estimators directly; `validate(true)` enforces integer responses.
struct ResponseTensor {
  std::vector<Matrix> layers;
  int max_level = 0;

  int n_layers() const { return static_cast<int>(layers.size()); }
  int n_subjects() const { return layers.empty() ? 0 : static_cast<int>(layers.front().rows()); }
  int n_items() const { return layers.empty() ? 0 : static_cast<int>(layers.front().cols()); }

  void validate(bool require_integral) const;
};

/// Population response matrices Z * Theta_l'.
struct PopulationResponse {
  std::vector<Matrix> layers;

  int n_layers() const { return static_cast<int>(layers.size()); }

  /// View the population matrices as a noiseless response tensor.
  ResponseTensor as_responses(int max_level) const { return {layers, max_level}; }
};

/// Uniform class assignment, redrawn as a whole until no class is empty.
Partition sample_partition(int n_subjects, int n_classes, Rng& rng);

/// Theta_l(j,k) = rho * u with u ~ Uniform(0, 1) i.i.d.
ItemParameterSet sample_item_params(int n_items, int n_classes, int n_layers, double rho,
                                    int max_level, Rng& rng);

PopulationResponse population_response(const Partition& z, const ItemParameterSet& thetas);

/// R_l(i,j) ~ Binomial(M, pop_l(i,j) / M), drawn as a sum of M Bernoulli trials.
ResponseTensor sample_responses(const PopulationResponse& pop, int max_level, Rng& rng);

/// A full synthetic instance with its ground truth.
struct SyntheticInstance {
  ModelParams params;
  Partition truth;
  ItemParameterSet thetas;
  ResponseTensor responses;
};

/// Draws partition, item parameters and responses from independent child
/// streams of `seed`.
SyntheticInstance simulate(const ModelParams& params, std::uint64_t seed);

}  // namespace mllcm
