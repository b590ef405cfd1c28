#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mllcm/aggregate.hpp"
#include "mllcm/kmeans.hpp"
#include "mllcm/model.hpp"
#include "mllcm/spectral.hpp"

namespace mllcm {

enum class Method { SoR, DSoG, SoG, SoRK, SoGK, DSoGK };

/// All six methods in reporting order.
const std::vector<Method>& all_methods();

/// "LCA-SoR", "LCA-DSoG", ...
std::string method_name(Method m);

/// Accepts the full name ("LCA-DSoG") or the short suffix ("DSoG"), case-insensitive.
Method parse_method(std::string_view name);

bool is_spectral(Method m);

struct FitResult {
  Partition z_hat;
  std::vector<Matrix> theta_hats;  // L matrices, J x K
  Method method = Method::SoR;
  /// sigma_K / sigma_{K+1} (|lambda| analogue for Gram methods); infinite when
  /// no (K+1)-th value exists or it is zero. NaN for the K-means baselines.
  double spectral_gap = 0.0;
  double inertia = 0.0;
  std::vector<std::string> warnings;
};

/// Theta_hat_l = R_l' Z (Z'Z)^{-1}, evaluated as per-class column means.
std::vector<Matrix> estimate_theta(const ResponseTensor& r, const Partition& z_hat);

/// Caches the aggregates and the full decomposition a method needs so the
/// estimator can be run for several K on the same data.
class Estimator {
 public:
  Estimator(const ResponseTensor& r, Method method);

  FitResult fit(int k, Rng& rng, const KMeansConfig& cfg = {}) const;

  Method method() const { return method_; }
  const ResponseTensor& responses() const { return responses_; }

 private:
  ResponseTensor responses_;
  Method method_;
  Matrix rows_;  // K-means input for baselines
  std::optional<TruncatedSVD> svd_;
  std::optional<TruncatedEigen> eig_;
};

FitResult fit(const ResponseTensor& r, Method method, int k, Rng& rng, const KMeansConfig& cfg = {});

FitResult fit_lca_sor(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg = {});
FitResult fit_lca_dsog(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg = {});
FitResult fit_lca_sog(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg = {});
/// `which` must be one of SoRK, SoGK, DSoGK.
FitResult fit_baseline(const ResponseTensor& r, int k, Method which, Rng& rng,
                       const KMeansConfig& cfg = {});

/// Ratios behind the sparsity requirements of the estimators.
struct SparsityReport {
  /// rho L max(N,J) / (M^2 log(N+J+L)), governs LCA-SoR.
  double sor_ratio = 0.0;
  /// rho^2 N J L / (M^4 log(N+J+L)), governs LCA-DSoG and LCA-SoG.
  double gram_ratio = 0.0;
  bool sor_below_regime = false;
  bool gram_below_regime = false;
};

SparsityReport check_sparsity_regime(const ModelParams& params);

}  // namespace mllcm
