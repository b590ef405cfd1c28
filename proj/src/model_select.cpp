#include "mllcm/model_select.hpp"

#include <algorithm>

#include "mllcm/error.hpp"

namespace mllcm {

double averaged_modularity(const ModularityIngredients& ing, const Partition& z_hat,
                           std::vector<int>* skipped_layers) {
  const int n_layers = static_cast<int>(ing.a.size());
  require(n_layers >= 1, "no layers");
  const int k = z_hat.n_classes();
  std::vector<std::vector<int>> members(k);
  for (int i = 0; i < z_hat.n_subjects(); ++i) members[z_hat[i]].push_back(i);

  double total = 0.0;
  int used = 0;
  for (int l = 0; l < n_layers; ++l) {
    const Matrix& a = ing.a[l];
    const Vector& d = ing.degrees[l];
    require(a.rows() == z_hat.n_subjects(), "partition does not cover all subjects");
    const double two_omega = 2.0 * ing.omegas[l];
    if (!(two_omega > 0.0)) {
      if (skipped_layers) skipped_layers->push_back(l);
      continue;
    }
    // Per class c: e_c = sum of A over member pairs, deg_c = sum of member degrees.
    // Q_l = sum_c [ e_c / 2w - (deg_c / 2w)^2 ].
    double q = 0.0;
    for (const auto& mem : members) {
      double within = 0.0;
      double degree = 0.0;
      for (int i : mem) {
        double row = 0.0;
        for (int j : mem) row += a(i, j);
        within += row;
        degree += d(i);
      }
      const double frac = degree / two_omega;
      q += within / two_omega - frac * frac;
    }
    total += q;
    ++used;
  }
  if (used == 0) throw InvalidArgument("averaged modularity undefined: every layer is all-zero");
  return total / used;
}

ModularityCurve select_k(const ResponseTensor& r, Method method, int k_min, int k_max, Rng& rng,
                         const KMeansConfig& cfg) {
  r.validate(false);
  require(k_min >= 1 && k_min <= k_max && k_max <= std::min(r.n_subjects(), r.n_items()),
          "k range must satisfy 1 <= k_min <= k_max <= min(N, J)");
  return select_k(Estimator(r, method), build_modularity_ingredients(r), k_min, k_max, rng, cfg);
}

ModularityCurve select_k(const Estimator& est, const ModularityIngredients& ing, int k_min,
                         int k_max, Rng& rng, const KMeansConfig& cfg) {
  const ResponseTensor& r = est.responses();
  require(k_min >= 1 && k_min <= k_max && k_max <= std::min(r.n_subjects(), r.n_items()),
          "k range must satisfy 1 <= k_min <= k_max <= min(N, J)");
  require(static_cast<int>(ing.a.size()) == r.n_layers(), "modularity graphs do not match responses");
  ModularityCurve curve;
  curve.method = est.method();
  for (int l : ing.empty_layers) {
    curve.warnings.push_back("layer " + std::to_string(l + 1) +
                             " has no responses; excluded from averaged modularity");
  }
  std::optional<double> best;
  for (int k = k_min; k <= k_max; ++k) {
    curve.k_values.push_back(k);
    Rng k_rng = rng.child("select-k", static_cast<std::uint64_t>(k));
    try {
      const FitResult fit = est.fit(k, k_rng, cfg);
      const double q = averaged_modularity(ing, fit.z_hat);
      curve.q_values.push_back(q);
      if (!best || q > *best) {
        best = q;
        curve.k_star = k;
      }
    } catch (const EstimationFailure& e) {
      curve.q_values.push_back(std::nullopt);
      curve.warnings.push_back("k=" + std::to_string(k) + ": " + e.what());
    }
  }
  if (!best) throw EstimationFailure("estimator failed for every k in the range");
  return curve;
}

}  // namespace mllcm
