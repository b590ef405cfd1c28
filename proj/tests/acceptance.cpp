// Acceptance suite. Runs every criterion, or one with --criterion N, and
// prints one PASS/FAIL line per criterion. Exit status is nonzero if any fail.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "mllcm/aggregate.hpp"
#include "mllcm/estimators.hpp"
#include "mllcm/harness.hpp"
#include "mllcm/metrics.hpp"
#include "mllcm/model_select.hpp"
#include "mllcm/spectral.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mllcm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::filesystem::path g_out_dir;

// Mean clustering error per (method, sweep value) over successful replications.
std::map<Method, std::map<double, double>> mean_errors(const ExperimentResult& res, int& failed) {
  std::map<Method, std::map<double, double>> out;
  failed = 0;
  for (const auto& row : summarize(res)) {
    failed += row.n_failed;
    out[parse_method(row.method)][row.param_value] =
        row.clustering_error_mean.value_or(std::numeric_limits<double>::infinity());
  }
  return out;
}

void dump(const std::string& name, const ExperimentResult& res) {
  if (g_out_dir.empty()) return;
  std::filesystem::create_directories(g_out_dir);
  std::ofstream r(g_out_dir / (name + "_results.csv"));
  write_results_csv(r, res);
  std::ofstream s(g_out_dir / (name + "_summary.csv"));
  write_summary_csv(s, summarize(res));
}

std::string means_line(const std::map<Method, std::map<double, double>>& m) {
  std::ostringstream os;
  for (const auto& [method, by_value] : m) {
    os << ' ' << method_name(method) << '[';
    bool first = true;
    for (const auto& [v, e] : by_value) {
      os << (first ? "" : " ") << v << ':' << fmt("%.4f", e);
      first = false;
    }
    os << ']';
  }
  return os.str();
}

Outcome c1_noiseless_recovery() {
  Outcome o;
  Rng rng(101);
  const int ls[] = {1, 3, 10};
  int instances = 0;
  double worst_l2 = 0.0;
  while (instances < 20) {
    const int n = 30 + static_cast<int>(rng.below(71));
    const int k = 2 + static_cast<int>(rng.below(2));
    const int l = ls[rng.below(3)];
    const int j = 6 + static_cast<int>(rng.below(15));
    const auto inst = fixture::noiseless(n, j, k, l, 5, 1.0, rng.next_u64());
    if (!fixture::rank_conditions_hold(inst.thetas)) continue;
    ++instances;
    for (Method m : all_methods()) {
      Rng fit_rng(rng.next_u64());
      const auto f = fit(inst.responses, m, k, fit_rng);
      const auto rep = score(inst.truth, f.z_hat, &inst.thetas.thetas, &f.theta_hats);
      worst_l2 = std::max(worst_l2, *rep.relative_l2_error);
      if (rep.clustering_error != 0.0 || !(*rep.relative_l2_error < 1e-10)) {
        o.pass = false;
        o.detail += " " + method_name(m) + " failed at N=" + std::to_string(n) + ",K=" +
                    std::to_string(k) + ",L=" + std::to_string(l) + ";";
      }
    }
  }
  o.detail += " 20 instances x 6 methods, worst rel_l2=" + fmt("%.3g", worst_l2);
  return o;
}

Outcome c2_debias() {
  Outcome o;
  Rng rng(2024);
  const Partition z({0, 0, 1, 1}, 2);
  const auto thetas = sample_item_params(6, 2, 3, 0.5, 5, rng);
  const auto pop = population_response(z, thetas);
  Matrix target = Matrix::Zero(4, 4);
  for (const auto& p : pop.layers) target += p * p.transpose();

  constexpr int reps = 10000;
  Matrix sum_d = Matrix::Zero(4, 4), sq_d = Matrix::Zero(4, 4);
  Matrix sum_s = Matrix::Zero(4, 4), sq_s = Matrix::Zero(4, 4);
  Rng draw(7);
  for (int rep = 0; rep < reps; ++rep) {
    const auto agg = build_aggregates(sample_responses(pop, 5, draw));
    sum_d += agg.s_sum_debiased;
    sq_d += agg.s_sum_debiased.cwiseProduct(agg.s_sum_debiased);
    sum_s += agg.s_sum;
    sq_s += agg.s_sum.cwiseProduct(agg.s_sum);
  }
  int off_ok = 0, diag_ok = 0, s_diag_biased = 0;
  double worst_diag_z = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      const double mean_d = sum_d(i, k) / reps;
      const double se_d = std::sqrt(std::max(0.0, sq_d(i, k) / reps - mean_d * mean_d) / reps);
      const bool within = std::abs(mean_d - target(i, k)) <= 5.0 * se_d;
      if (i != k) {
        off_ok += within;
      } else {
        diag_ok += within;
        worst_diag_z = std::max(worst_diag_z, std::abs(mean_d - target(i, i)));
        const double mean_s = sum_s(i, i) / reps;
        const double se_s = std::sqrt((sq_s(i, i) / reps - mean_s * mean_s) / reps);
        s_diag_biased += std::abs(mean_s - target(i, i)) > 5.0 * se_s;
      }
    }
  }
  o.pass = off_ok == 12 && diag_ok == 4 && s_diag_biased >= 1;
  o.detail = " S~ off-diagonal within 5 SE: " + std::to_string(off_ok) + "/12; S~ diagonal within 5 SE: " +
             std::to_string(diag_ok) + "/4 (S~ diagonal is identically 0, largest gap to target " +
             fmt("%.3f", worst_diag_z) + "); S_sum diagonal entries flagged biased: " +
             std::to_string(s_diag_biased) + "/4";
  return o;
}

Partition random_partition(int n, int k, Rng& rng) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i < k ? i : static_cast<int>(rng.below(k));
  for (int i = n - 1; i > 0; --i) std::swap(labels[i], labels[rng.below(i + 1)]);
  return Partition(labels, k);
}

Outcome c3_metric_oracles() {
  Outcome o;
  Rng rng(33);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng.below(4));
    const int n = k + static_cast<int>(rng.below(40));
    const auto a = random_partition(n, k, rng);
    const auto b = random_partition(n, k, rng);
    mismatches += clustering_error(a, b) != oracle::clustering_error(a.labels(), b.labels(), k);
    mismatches += hamming_error(a, b) != oracle::hamming_error(a.labels(), b.labels(), k);
  }
  int identity_failures = 0;
  for (int t = 0; t < 50; ++t) {
    const int k = 1 + static_cast<int>(rng.below(5));
    const auto a = random_partition(20 + t, k, rng);
    identity_failures += nmi(a, a) != 1.0;
    identity_failures += ari(a, a) != 1.0;
    const Partition single(std::vector<int>(a.n_subjects(), 0), 1);
    if (k > 1) identity_failures += nmi(a, single) != 0.0;
  }
  o.pass = mismatches == 0 && identity_failures == 0;
  o.detail = " brute-force mismatches " + std::to_string(mismatches) + "/400, identity failures " +
             std::to_string(identity_failures);
  return o;
}

Outcome c4_spectral_structure() {
  Outcome o;
  Rng rng(44);
  double worst = 0.0, worst_spread = 0.0;
  int checked = 0;
  while (checked < 20) {
    const int n = 30 + static_cast<int>(rng.below(71));
    const int k = 2 + static_cast<int>(rng.below(3));
    const int l = 1 + static_cast<int>(rng.below(6));
    const auto inst = fixture::noiseless(n, 12, k, l, 5, 1.0, rng.next_u64());
    if (!fixture::rank_conditions_hold(inst.thetas)) continue;
    ++checked;
    Matrix r_sum = Matrix::Zero(n, 12);
    Matrix s_sum = Matrix::Zero(n, n);
    for (const auto& p : inst.pop.layers) {
      r_sum += p;
      s_sum += p * p.transpose();
    }
    const auto sizes = inst.truth.class_sizes();
    for (const Matrix& emb : {top_k_svd(r_sum, k).u, top_k_eigen_by_magnitude(s_sum, k).v}) {
      std::vector<Vector> rep(k);
      for (int i = 0; i < n; ++i) {
        if (rep[inst.truth[i]].size() == 0) rep[inst.truth[i]] = emb.row(i).transpose();
        worst_spread = std::max(worst_spread, (emb.row(i).transpose() - rep[inst.truth[i]]).norm());
      }
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
          const double expect = std::sqrt(1.0 / sizes[a] + 1.0 / sizes[b]);
          worst = std::max(worst, std::abs((rep[a] - rep[b]).norm() - expect));
        }
    }
  }
  o.pass = worst <= 1e-6 && worst_spread <= 1e-6;
  o.detail = " 20 instances x {U of R_sum, V of S_sum}: within-class spread " + fmt("%.2g", worst_spread) +
             ", distance error " + fmt("%.2g", worst);
  return o;
}

Outcome c5_exp1() {
  Outcome o;
  const auto res = run_experiment(preset("exp1-desk"));
  dump("exp1-desk", res);
  int failed = 0;
  const auto m = mean_errors(res, failed);
  for (const auto& [method, by] : m) {
    if (!(by.at(500) < by.at(100))) {
      o.pass = false;
      o.detail += " " + method_name(method) + " not improved from N=100 to N=500;";
    }
  }
  const double d = m.at(Method::DSoG).at(500), g = m.at(Method::SoG).at(500), r = m.at(Method::SoR).at(500);
  if (!(d <= g + 0.02 && g <= r + 0.02)) {
    o.pass = false;
    o.detail += " ordering DSoG <= SoG <= SoR violated at N=500;";
  }
  o.detail += " failed fits " + std::to_string(failed) + ";" + means_line(m);
  return o;
}

Outcome c6_exp2() {
  Outcome o;
  const auto res = run_experiment(preset("exp2-desk"));
  dump("exp2-desk", res);
  int failed = 0;
  const auto m = mean_errors(res, failed);
  for (const auto& [method, by] : m) {
    if (!(by.at(20) <= by.at(2))) {
      o.pass = false;
      o.detail += " " + method_name(method) + " worse at L=20 than L=2;";
    }
  }
  o.detail += " failed fits " + std::to_string(failed) + ";" + means_line(m);
  return o;
}

Outcome c7_exp3() {
  Outcome o;
  const auto res = run_experiment(preset("exp3-desk"));
  dump("exp3-desk", res);
  int failed = 0;
  const auto m = mean_errors(res, failed);
  for (const auto& [method, by] : m) {
    int inversions = 0;
    double largest = 0.0;
    for (auto it = by.begin(); std::next(it) != by.end(); ++it) {
      const double rise = std::next(it)->second - it->second;
      if (rise > 0.0) {
        ++inversions;
        largest = std::max(largest, rise);
      }
    }
    if (inversions > 1 || largest > 0.01) {
      o.pass = false;
      o.detail += " " + method_name(method) + " not monotone in rho;";
    }
  }
  o.detail += " failed fits " + std::to_string(failed) + ";" + means_line(m);
  return o;
}

Outcome c8_ksel() {
  Outcome o;
  const auto cfg = preset("ksel");
  const auto res = run_experiment(cfg);
  dump("ksel", res);
  std::vector<int> ks;
  std::map<int, int> hist;
  for (const auto& r : res.records)
    if (r.k_selected) {
      ks.push_back(*r.k_selected);
      ++hist[*r.k_selected];
    }
  const double acc = ks.empty() ? 0.0 : accuracy_rate(ks, cfg.base.n_classes) * ks.size() / res.records.size();
  o.pass = acc >= 0.9;
  o.detail = " KLCA-DSoG accuracy " + fmt("%.3f", acc) + " over " + std::to_string(res.records.size()) +
             " replications; k* counts:";
  for (const auto& [k, c] : hist) o.detail += " " + std::to_string(k) + "->" + std::to_string(c);
  return o;
}

Outcome c9_modularity() {
  Outcome o;
  int nonzero = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed + 900);
    const int n = 5 + static_cast<int>(rng.below(60));
    const auto inst = simulate(ModelParams{n, 6, 2, 1 + static_cast<int>(rng.below(5)), 5, 2.0}, seed);
    const auto ing = build_modularity_ingredients(inst.responses);
    nonzero += averaged_modularity(ing, Partition(std::vector<int>(n, 0), 1)) != 0.0;
  }
  Matrix r(6, 4);
  r << 3, 0, 1, 0, 2, 1, 0, 0, 4, 0, 2, 1, 0, 3, 0, 2, 1, 4, 0, 3, 0, 2, 1, 5;
  const auto ing = build_modularity_ingredients(ResponseTensor{{r}, 5});
  const std::vector<int> lab = {0, 0, 0, 1, 1, 1};
  const double gap =
      std::abs(averaged_modularity(ing, Partition(lab, 2)) - oracle::newman_girvan(r * r.transpose(), lab));
  o.pass = nonzero == 0 && gap <= 1e-12;
  o.detail = " Q(k=1) nonzero on " + std::to_string(nonzero) + "/50 tensors; Newman-Girvan gap " +
             fmt("%.2g", gap);
  return o;
}

Outcome c10_determinism() {
  Outcome o;
  auto cfg = preset("exp1-desk");
  std::ostringstream a, b;
  cfg.workers = 1;
  write_results_csv(a, run_experiment(cfg));
  cfg.workers = 3;
  write_results_csv(b, run_experiment(cfg));
  o.pass = a.str() == b.str() && !a.str().empty();
  o.detail = " exp1-desk results CSV at workers=1 vs workers=3: " +
             std::string(o.pass ? "byte-identical" : "differ") + " (" + std::to_string(a.str().size()) +
             " bytes)";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 when the criterion states no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string out;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--out", out, "write experiment results and summaries here");
  CLI11_PARSE(app, argc, argv);
  g_out_dir = out;

  const std::vector<Criterion> all = {
      {1, "noiseless exact recovery", 10, c1_noiseless_recovery},
      {2, "debias correctness", 30, c2_debias},
      {3, "metric oracle equivalence", 0, c3_metric_oracles},
      {4, "spectral structure", 0, c4_spectral_structure},
      {5, "experiment-1 trend", 180, c5_exp1},
      {6, "experiment-2 trend", 180, c6_exp2},
      {7, "experiment-3 trend", 180, c7_exp3},
      {8, "K-selection accuracy", 300, c8_ksel},
      {9, "modularity identities", 0, c9_modularity},
      {10, "determinism", 0, c10_determinism},
  };

  int failures = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string(" exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_s) + " s limit";
    }
    failures += !o.pass;
    std::printf("criterion %2d %-28s %s (%.1f s):%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
