#include "mllcm/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "mllcm/error.hpp"

namespace mllcm {

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::SoR,  Method::DSoG, Method::SoG,
                                              Method::SoRK, Method::SoGK, Method::DSoGK};
  return methods;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::SoR: return "LCA-SoR";
    case Method::DSoG: return "LCA-DSoG";
    case Method::SoG: return "LCA-SoG";
    case Method::SoRK: return "LCA-SoRK";
    case Method::SoGK: return "LCA-SoGK";
    case Method::DSoGK: return "LCA-DSoGK";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string key = lower(name);
  for (Method m : all_methods()) {
    const std::string full = lower(method_name(m));
    if (key == full || key == full.substr(4)) return m;
  }
  throw InvalidArgument("unknown method: " + std::string(name));
}

bool is_spectral(Method m) { return m == Method::SoR || m == Method::DSoG || m == Method::SoG; }

std::vector<Matrix> estimate_theta(const ResponseTensor& r, const Partition& z_hat) {
  require(z_hat.n_subjects() == r.n_subjects(), "partition and responses differ in N");
  const auto sizes = z_hat.class_sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) throw EstimationFailure("estimated class " + std::to_string(k + 1) + " is empty");
  }
  std::vector<Matrix> out;
  out.reserve(r.layers.size());
  for (const auto& layer : r.layers) {
    Matrix theta = Matrix::Zero(layer.cols(), z_hat.n_classes());
    for (Eigen::Index i = 0; i < layer.rows(); ++i)
      theta.col(z_hat[i]) += layer.row(i).transpose();
    for (int k = 0; k < z_hat.n_classes(); ++k) theta.col(k) /= sizes[k];
    out.push_back(std::move(theta));
  }
  return out;
}

Estimator::Estimator(const ResponseTensor& r, Method method) : responses_(r), method_(method) {
  r.validate(false);
  const AggregationBundle agg = build_aggregates(r);
  switch (method) {
    case Method::SoR: svd_ = full_svd(agg.r_sum); break;
    case Method::DSoG: eig_ = full_eigen_by_magnitude(agg.s_sum_debiased); break;
    case Method::SoG: eig_ = full_eigen_by_magnitude(agg.s_sum); break;
    case Method::SoRK: rows_ = agg.r_sum; break;
    case Method::SoGK: rows_ = agg.s_sum; break;
    case Method::DSoGK: rows_ = agg.s_sum_debiased; break;
  }
}

FitResult Estimator::fit(int k, Rng& rng, const KMeansConfig& cfg) const {
  const ResponseTensor& r = responses_;
  require(k >= 1 && k <= std::min(r.n_subjects(), r.n_items()), "K must lie in [1, min(N, J)]");
  FitResult res;
  res.method = method_;
  Matrix embedding;
  auto ratio = [](double top, double next) {
    return next > 0.0 ? top / next : std::numeric_limits<double>::infinity();
  };
  if (svd_) {
    TruncatedSVD t = truncate(*svd_, k);
    res.spectral_gap = ratio(t.sigma(k - 1), t.next_sigma);
    res.warnings = std::move(t.warnings);
    embedding = std::move(t.u);
  } else if (eig_) {
    TruncatedEigen t = truncate(*eig_, k);
    res.spectral_gap = ratio(std::abs(t.lambda(k - 1)), t.next_magnitude);
    res.warnings = std::move(t.warnings);
    embedding = std::move(t.v);
  } else {
    res.spectral_gap = std::numeric_limits<double>::quiet_NaN();
    embedding = rows_;
  }
  KMeansResult km = kmeans(embedding, k, rng, cfg);
  if (!km.labels.all_classes_nonempty()) {
    throw EstimationFailure(method_name(method_) + ": K-means returned fewer than " +
                            std::to_string(k) + " nonempty classes");
  }
  res.inertia = km.inertia;
  res.theta_hats = estimate_theta(r, km.labels);
  res.z_hat = std::move(km.labels);
  return res;
}

FitResult fit(const ResponseTensor& r, Method method, int k, Rng& rng, const KMeansConfig& cfg) {
  require(k >= 1 && k <= std::min(r.n_subjects(), r.n_items()), "K must lie in [1, min(N, J)]");
  return Estimator(r, method).fit(k, rng, cfg);
}

FitResult fit_lca_sor(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg) {
  return fit(r, Method::SoR, k, rng, cfg);
}

FitResult fit_lca_dsog(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg) {
  return fit(r, Method::DSoG, k, rng, cfg);
}

FitResult fit_lca_sog(const ResponseTensor& r, int k, Rng& rng, const KMeansConfig& cfg) {
  return fit(r, Method::SoG, k, rng, cfg);
}

FitResult fit_baseline(const ResponseTensor& r, int k, Method which, Rng& rng,
                       const KMeansConfig& cfg) {
  require(!is_spectral(which), "fit_baseline expects LCA-SoRK, LCA-SoGK or LCA-DSoGK");
  return fit(r, which, k, rng, cfg);
}

SparsityReport check_sparsity_regime(const ModelParams& p) {
  p.validate();
  const double n = p.n_subjects, j = p.n_items, l = p.n_layers, m = p.max_level;
  const double log_term = std::log(n + j + l);
  SparsityReport rep;
  rep.sor_ratio = p.rho * l * std::max(n, j) / (m * m * log_term);
  rep.gram_ratio = p.rho * p.rho * n * j * l / (m * m * m * m * log_term);
  rep.sor_below_regime = rep.sor_ratio < 1.0;
  rep.gram_below_regime = rep.gram_ratio < 1.0;
  return rep;
}

}  // namespace mllcm
