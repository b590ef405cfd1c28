#include "mllcm/aggregate.hpp"

#include "mllcm/error.hpp"

namespace mllcm {

namespace {

Matrix gram(const Matrix& r) {
  Matrix g = Matrix::Zero(r.rows(), r.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(r);
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

AggregationBundle build_aggregates(const ResponseTensor& r) {
  r.validate(false);
  const auto n = r.n_subjects();
  AggregationBundle agg;
  agg.r_sum = Matrix::Zero(n, r.n_items());
  agg.s_sum = Matrix::Zero(n, n);
  agg.s_sum_debiased = Matrix::Zero(n, n);
  // Layers are accumulated in order so the sums are bit-reproducible.
  for (const auto& layer : r.layers) {
    agg.r_sum += layer;
    Matrix g = gram(layer);
    agg.s_sum += g;
    // D_l(i,i) uses squared entries; on integer responses the debiased
    // diagonal cancels to exactly zero.
    g.diagonal() -= layer.rowwise().squaredNorm();
    agg.s_sum_debiased += g;
  }
  return agg;
}

ModularityIngredients build_modularity_ingredients(const ResponseTensor& r) {
  r.validate(false);
  ModularityIngredients ing;
  for (int l = 0; l < r.n_layers(); ++l) {
    Matrix a = gram(r.layers[l]);
    Vector d = a.rowwise().sum();
    const double omega = 0.5 * d.sum();
    if (omega == 0.0) ing.empty_layers.push_back(l);
    ing.a.push_back(std::move(a));
    ing.degrees.push_back(std::move(d));
    ing.omegas.push_back(omega);
  }
  return ing;
}

}  // namespace mllcm
