#include "mllcm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mllcm/error.hpp"

namespace mllcm {

void ModelParams::validate() const {
  require(n_subjects > 0 && n_items > 0 && n_classes > 0 && n_layers > 0 && max_level > 0,
          "model dimensions must be positive");
  require(n_classes <= std::min(n_subjects, n_items), "K must not exceed min(N, J)");
  require(rho > 0.0 && rho <= max_level, "rho must lie in (0, M]");
}

Partition::Partition(std::vector<int> labels, int n_classes)
    : labels_(std::move(labels)), n_classes_(n_classes) {
  require(n_classes_ >= 1, "partition needs at least one class");
  for (int l : labels_) {
    require(l >= 0 && l < n_classes_, "class label out of range");
  }
}

Partition Partition::from_one_based(const std::vector<int>& labels) {
  require(!labels.empty(), "empty label vector");
  std::vector<int> zero_based(labels.size());
  int k = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 1, "labels must be 1-based positive integers");
    zero_based[i] = labels[i] - 1;
    k = std::max(k, labels[i]);
  }
  return Partition(std::move(zero_based), k);
}

std::vector<int> Partition::class_sizes() const {
  std::vector<int> sizes(n_classes_, 0);
  for (int l : labels_) ++sizes[l];
  return sizes;
}

bool Partition::all_classes_nonempty() const {
  const auto sizes = class_sizes();
  return std::all_of(sizes.begin(), sizes.end(), [](int s) { return s > 0; });
}

std::vector<int> Partition::one_based() const {
  std::vector<int> out(labels_.size());
  std::transform(labels_.begin(), labels_.end(), out.begin(), [](int l) { return l + 1; });
  return out;
}

Matrix Partition::indicator() const {
  Matrix z = Matrix::Zero(n_subjects(), n_classes_);
  for (int i = 0; i < n_subjects(); ++i) z(i, labels_[i]) = 1.0;
  return z;
}

void ItemParameterSet::validate(int max_level) const {
  require(!thetas.empty(), "item parameter set has no layers");
  for (const auto& t : thetas) {
    require(t.rows() == thetas.front().rows() && t.cols() == thetas.front().cols(),
            "item parameter matrices differ in shape");
    require(t.allFinite() && t.minCoeff() >= 0.0 && t.maxCoeff() <= max_level,
            "item parameters must lie in [0, M]");
  }
}

void ResponseTensor::validate(bool require_integral) const {
  require(!layers.empty(), "response tensor has no layers");
  require(max_level >= 1, "response ceiling M must be positive");
  const auto n = layers.front().rows();
  const auto j = layers.front().cols();
  require(n > 0 && j > 0, "response layers are empty");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& r = layers[l];
    require(r.rows() == n && r.cols() == j, "response layers differ in shape");
    require(r.allFinite(), "non-finite response in layer " + std::to_string(l + 1));
    require(r.minCoeff() >= 0.0 && r.maxCoeff() <= max_level,
            "response outside [0, M] in layer " + std::to_string(l + 1));
    if (require_integral) {
      require((r.array() == r.array().round()).all(),
              "non-integer response in layer " + std::to_string(l + 1));
    }
  }
}

Partition sample_partition(int n_subjects, int n_classes, Rng& rng) {
  require(n_classes >= 1, "K must be positive");
  require(n_subjects >= n_classes, "cannot fill K classes with fewer than K subjects");
  constexpr int kMaxAttempts = 1'000'000;
  std::vector<int> labels(n_subjects);
  std::vector<int> sizes(n_classes);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto& l : labels) {
      l = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
      ++sizes[l];
    }
    if (std::all_of(sizes.begin(), sizes.end(), [](int s) { return s > 0; })) {
      return Partition(labels, n_classes);
    }
  }
  throw InvalidArgument("could not draw a partition without empty classes");
}

ItemParameterSet sample_item_params(int n_items, int n_classes, int n_layers, double rho,
                                    int max_level, Rng& rng) {
  require(n_items > 0 && n_classes > 0 && n_layers > 0, "dimensions must be positive");
  require(rho > 0.0 && rho <= max_level, "rho must lie in (0, M]");
  ItemParameterSet set;
  set.thetas.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    Matrix theta(n_items, n_classes);
    for (int k = 0; k < n_classes; ++k)
      for (int j = 0; j < n_items; ++j) theta(j, k) = rho * rng.uniform_open();
    set.thetas.push_back(std::move(theta));
  }
  return set;
}

PopulationResponse population_response(const Partition& z, const ItemParameterSet& thetas) {
  require(!thetas.thetas.empty(), "item parameter set has no layers");
  require(thetas.n_classes() == z.n_classes(), "class count of Z and Theta differ");
  PopulationResponse pop;
  pop.layers.reserve(thetas.thetas.size());
  for (const auto& theta : thetas.thetas) {
    require(theta.cols() == z.n_classes() && theta.rows() == thetas.n_items(),
            "item parameter matrices differ in shape");
    Matrix r(z.n_subjects(), theta.rows());
    for (int i = 0; i < z.n_subjects(); ++i) r.row(i) = theta.col(z[i]).transpose();
    pop.layers.push_back(std::move(r));
  }
  return pop;
}

ResponseTensor sample_responses(const PopulationResponse& pop, int max_level, Rng& rng) {
  require(max_level >= 1, "M must be positive");
  require(!pop.layers.empty(), "population has no layers");
  for (const auto& p : pop.layers) {
    require(p.allFinite() && p.minCoeff() >= 0.0 && p.maxCoeff() <= max_level,
            "population entries must lie in [0, M]");
  }
  ResponseTensor out;
  out.max_level = max_level;
  out.layers.reserve(pop.layers.size());
  for (const auto& p : pop.layers) {
    Matrix r(p.rows(), p.cols());
    // Row-major draw order; fixed so a seed maps to one tensor.
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        const double prob = p(i, j) / max_level;
        int successes = 0;
        for (int t = 0; t < max_level; ++t) successes += rng.uniform_open() < prob ? 1 : 0;
        r(i, j) = successes;
      }
    }
    out.layers.push_back(std::move(r));
  }
  return out;
}

SyntheticInstance simulate(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const Rng root(seed);
  Rng partition_rng = root.child("partition");
  Rng items_rng = root.child("items");
  Rng response_rng = root.child("responses");
  SyntheticInstance inst;
  inst.params = params;
  inst.truth = sample_partition(params.n_subjects, params.n_classes, partition_rng);
  inst.thetas = sample_item_params(params.n_items, params.n_classes, params.n_layers,
                                   params.rho, params.max_level, items_rng);
  inst.responses = sample_responses(population_response(inst.truth, inst.thetas),
                                    params.max_level, response_rng);
  return inst;
}

}  // namespace mllcm
