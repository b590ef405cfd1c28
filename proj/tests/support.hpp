// Shared test fixtures.
#pragma once

#include <Eigen/Dense>

#include "mllcm/model.hpp"

namespace fixture {

using namespace mllcm;

// Noiseless instance: population matrices injected as responses.
struct Noiseless {
  Partition truth;
  ItemParameterSet thetas;
  PopulationResponse pop;
  ResponseTensor responses;
};

inline Noiseless noiseless(int n, int j, int k, int l, int m, double rho, std::uint64_t seed) {
  Rng rng(seed);
  Noiseless out;
  out.truth = sample_partition(n, k, rng);
  out.thetas = sample_item_params(j, k, l, rho, m, rng);
  out.pop = population_response(out.truth, out.thetas);
  out.responses = out.pop.as_responses(m);
  return out;
}

// rank(sum Theta_l) == K and rank(sum Theta_l' Theta_l) == K.
inline bool rank_conditions_hold(const ItemParameterSet& set) {
  const auto j = set.n_items();
  const auto k = set.n_classes();
  Matrix sum = Matrix::Zero(j, k);
  Matrix gram = Matrix::Zero(k, k);
  for (const auto& t : set.thetas) {
    sum += t;
    gram += t.transpose() * t;
  }
  Eigen::FullPivLU<Matrix> lu1(sum), lu2(gram);
  lu1.setThreshold(1e-10);
  lu2.setThreshold(1e-10);
  return lu1.rank() == k && lu2.rank() == k;
}

}  // namespace fixture
