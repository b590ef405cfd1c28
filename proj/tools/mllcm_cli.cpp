// Command-line front end: simulate, fit, score, select-k, experiment, summarize.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mllcm/aggregate.hpp"
#include "mllcm/error.hpp"
#include "mllcm/estimators.hpp"
#include "mllcm/harness.hpp"
#include "mllcm/io.hpp"
#include "mllcm/metrics.hpp"
#include "mllcm/model_select.hpp"

namespace fs = std::filesystem;
using namespace mllcm;

namespace {

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  return out;
}

void add_kmeans_options(CLI::App* cmd, KMeansConfig& cfg) {
  cmd->add_option("--restarts", cfg.restarts, "K-means restarts")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "Lloyd iterations per restart")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "center-movement tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral latent class analysis for multi-layer categorical data"};
  app.require_subcommand(1);

  // simulate
  ModelParams sim;
  sim.n_subjects = 500;
  sim.n_items = 100;
  sim.n_classes = 3;
  sim.n_layers = 10;
  sim.max_level = 5;
  sim.rho = 0.1;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Sample a synthetic dataset directory");
  simulate_cmd->add_option("--N", sim.n_subjects, "subjects")->capture_default_str();
  simulate_cmd->add_option("--J", sim.n_items, "items")->capture_default_str();
  simulate_cmd->add_option("--K", sim.n_classes, "latent classes")->capture_default_str();
  simulate_cmd->add_option("--L", sim.n_layers, "layers")->capture_default_str();
  simulate_cmd->add_option("--M", sim.max_level, "maximum response level")->capture_default_str();
  simulate_cmd->add_option("--rho", sim.rho, "sparsity parameter")->capture_default_str();
  simulate_cmd->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  simulate_cmd->add_option("--out", sim_out, "output directory")->required();

  // fit
  std::string fit_input, fit_method = "LCA-DSoG", fit_out, fit_dump;
  int fit_k = 0;
  std::uint64_t fit_seed = 1;
  KMeansConfig fit_km;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate classes and item parameters");
  fit_cmd->add_option("--input", fit_input, "dataset directory")->required();
  fit_cmd->add_option("--method", fit_method, "LCA-SoR, LCA-DSoG, LCA-SoG, LCA-SoRK, LCA-SoGK, LCA-DSoGK")
      ->capture_default_str();
  fit_cmd->add_option("--k", fit_k, "number of latent classes")->required();
  fit_cmd->add_option("--seed", fit_seed, "random seed")->capture_default_str();
  fit_cmd->add_option("--out", fit_out, "output directory")->required();
  fit_cmd->add_option("--dump-aggregates", fit_dump, "also write R_sum, S_sum, debiased S_sum here");
  add_kmeans_options(fit_cmd, fit_km);

  // score
  std::string score_truth, score_est, score_theta_true, score_theta_est;
  bool score_header = false;
  auto* score_cmd = app.add_subcommand("score", "Compare an estimated partition with the truth");
  score_cmd->add_option("--truth", score_truth, "true labels.csv")->required();
  score_cmd->add_option("--est", score_est, "estimated labels.csv")->required();
  score_cmd->add_option("--theta-true", score_theta_true, "directory with true theta_###.csv");
  score_cmd->add_option("--theta-est", score_theta_est, "directory with estimated theta_###.csv");
  score_cmd->add_flag("--header", score_header, "print the column header first");

  // select-k
  std::string sel_input, sel_method = "LCA-DSoG", sel_out;
  int sel_kmin = 1, sel_kmax = 8;
  std::uint64_t sel_seed = 1;
  KMeansConfig sel_km;
  auto* select_cmd = app.add_subcommand("select-k", "Choose K by maximizing averaged modularity");
  select_cmd->add_option("--input", sel_input, "dataset directory")->required();
  select_cmd->add_option("--method", sel_method, "estimator")->capture_default_str();
  select_cmd->add_option("--k-min", sel_kmin, "smallest candidate K")->capture_default_str();
  select_cmd->add_option("--k-max", sel_kmax, "largest candidate K")->capture_default_str();
  select_cmd->add_option("--seed", sel_seed, "random seed")->capture_default_str();
  select_cmd->add_option("--out", sel_out, "curve CSV (k,Q,selected)")->required();
  add_kmeans_options(select_cmd, sel_km);

  // experiment
  std::string exp_config, exp_preset, exp_out, exp_summary;
  int exp_workers = 0;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a replicated simulation study");
  auto* cfg_opt = exp_cmd->add_option("--config", exp_config, "JSON experiment config");
  auto* preset_opt = exp_cmd->add_option("--preset", exp_preset,
                                         "built-in study: exp1, exp2, exp3, ksel (append -desk for desk scale)");
  cfg_opt->excludes(preset_opt);
  exp_cmd->add_option("--out", exp_out, "results CSV")->required();
  exp_cmd->add_option("--workers", exp_workers, "worker threads (overrides the config)");
  exp_cmd->add_option("--summary", exp_summary, "also write the summary CSV here");

  // summarize
  std::string sum_in, sum_out;
  auto* sum_cmd = app.add_subcommand("summarize", "Aggregate a results CSV");
  sum_cmd->add_option("--in", sum_in, "results CSV")->required();
  sum_cmd->add_option("--out", sum_out, "summary CSV")->required();

  // sparsity
  ModelParams sp = sim;
  auto* sparsity_cmd = app.add_subcommand("sparsity", "Report the sparsity-regime ratios");
  sparsity_cmd->add_option("--N", sp.n_subjects)->capture_default_str();
  sparsity_cmd->add_option("--J", sp.n_items)->capture_default_str();
  sparsity_cmd->add_option("--K", sp.n_classes)->capture_default_str();
  sparsity_cmd->add_option("--L", sp.n_layers)->capture_default_str();
  sparsity_cmd->add_option("--M", sp.max_level)->capture_default_str();
  sparsity_cmd->add_option("--rho", sp.rho)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) {
      const SyntheticInstance inst = simulate(sim, sim_seed);
      io::Dataset ds;
      ds.responses = inst.responses;
      ds.n_classes = sim.n_classes;
      ds.rho = sim.rho;
      ds.seed = sim_seed;
      ds.truth = inst.truth;
      ds.thetas = inst.thetas.thetas;
      io::write_dataset(sim_out, ds);
    } else if (*fit_cmd) {
      const io::Dataset ds = io::read_dataset(fit_input);
      if (!fit_dump.empty()) io::write_aggregates(fit_dump, build_aggregates(ds.responses));
      Rng rng(fit_seed);
      const FitResult res = fit(ds.responses, parse_method(fit_method), fit_k, rng, fit_km);
      warn_all(res.warnings);
      fs::create_directories(fit_out);
      io::write_labels(fs::path(fit_out) / "labels.csv", res.z_hat);
      io::write_thetas(fit_out, res.theta_hats);
      std::cout << method_name(res.method) << " K=" << fit_k << " spectral_gap=" << fmt(res.spectral_gap)
                << " inertia=" << fmt(res.inertia) << '\n';
    } else if (*score_cmd) {
      const Partition truth = io::read_labels(score_truth);
      const Partition est = io::read_labels(score_est);
      std::optional<std::vector<Matrix>> tt, te;
      if (!score_theta_true.empty() || !score_theta_est.empty()) {
        require(!score_theta_true.empty() && !score_theta_est.empty(),
                "--theta-true and --theta-est go together");
        tt = io::read_thetas(score_theta_true);
        te = io::read_thetas(score_theta_est);
      }
      const MetricReport rep = score(truth, est, tt ? &*tt : nullptr, te ? &*te : nullptr);
      if (score_header) std::cout << "clustering_error,hamming_error,nmi,ari,rel_l2_error\n";
      std::cout << fmt(rep.clustering_error) << ',' << fmt(rep.hamming_error) << ',' << fmt(rep.nmi)
                << ',' << fmt(rep.ari) << ','
                << (rep.relative_l2_error ? fmt(*rep.relative_l2_error) : std::string("NA")) << '\n';
    } else if (*select_cmd) {
      const io::Dataset ds = io::read_dataset(sel_input);
      Rng rng(sel_seed);
      const ModularityCurve curve =
          select_k(ds.responses, parse_method(sel_method), sel_kmin, sel_kmax, rng, sel_km);
      warn_all(curve.warnings);
      auto out = open_out(sel_out);
      out << "k,Q,selected\n";
      for (std::size_t i = 0; i < curve.k_values.size(); ++i) {
        const int k = curve.k_values[i];
        out << k << ',' << (curve.q_values[i] ? fmt(*curve.q_values[i]) : std::string("NA")) << ','
            << (k == curve.k_star ? 1 : 0) << '\n';
      }
      std::cout << "selected K=" << curve.k_star << '\n';
    } else if (*exp_cmd) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) {
        std::ifstream in(exp_config);
        if (!in) throw InvalidArgument("cannot read " + exp_config);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw InvalidArgument(exp_config + ": " + e.what());
        }
        cfg = ExperimentConfig::from_json(j);
      } else if (!exp_preset.empty()) {
        cfg = preset(exp_preset);
      } else {
        throw InvalidArgument("experiment needs --config or --preset");
      }
      if (exp_workers > 0) cfg.workers = exp_workers;
      const ExperimentResult res = run_experiment(cfg);
      for (const auto& r : res.records) {
        if (!r.ok) {
          std::cerr << "failed: " << r.param_name << '=' << fmt(r.param_value) << " rep " << r.replication
                    << ' ' << method_name(r.method) << ": "
                    << (r.messages.empty() ? std::string("?") : r.messages.back()) << '\n';
        }
      }
      auto out = open_out(exp_out);
      write_results_csv(out, res);
      if (!exp_summary.empty()) {
        auto sout = open_out(exp_summary);
        write_summary_csv(sout, summarize(res));
      }
    } else if (*sum_cmd) {
      std::ifstream in(sum_in);
      if (!in) throw InvalidArgument("cannot read " + sum_in);
      const ExperimentResult res = read_results_csv(in);
      auto out = open_out(sum_out);
      write_summary_csv(out, summarize(res));
    } else if (*sparsity_cmd) {
      const SparsityReport rep = check_sparsity_regime(sp);
      std::cout << "sor_ratio=" << fmt(rep.sor_ratio) << (rep.sor_below_regime ? " (below regime)" : "")
                << "\ngram_ratio=" << fmt(rep.gram_ratio)
                << (rep.gram_below_regime ? " (below regime)" : "") << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
