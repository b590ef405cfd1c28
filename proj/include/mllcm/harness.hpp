#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mllcm/estimators.hpp"
#include "mllcm/kmeans.hpp"
#include "mllcm/metrics.hpp"
#include "mllcm/model.hpp"

namespace mllcm {

/// One swept simulation study.
struct ExperimentConfig {
  std::string id = "experiment";
  /// Values for the parameters that are not swept. `n_items` is ignored when
  /// `items_divisor` is set (J = N / divisor).
  ModelParams base{500, 100, 3, 10, 5, 0.1};
  std::optional<int> items_divisor = 5;
  /// One of "N", "L", "rho".
  std::string param_name = "N";
  std::vector<double> param_values;
  int replications = 50;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods = all_methods();
  bool select_k = false;
  int k_min = 1;
  int k_max = 8;
  KMeansConfig kmeans;
  int workers = 1;
  /// Wall time depends on the machine; off by default so output is reproducible.
  bool record_wall_time = false;

  /// Model parameters at one sweep value.
  ModelParams params_at(double value) const;

  /// Throws InvalidArgument on an unusable configuration.
  void validate() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

/// Built-in studies: "exp1", "exp2", "exp3", "ksel" at paper scale, and the
/// same names with a "-desk" suffix at desk scale.
ExperimentConfig preset(const std::string& name);

struct ResultRecord {
  std::string experiment;
  std::string param_name;
  double param_value = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  Method method = Method::SoR;
  bool ok = false;
  MetricReport metrics;
  std::optional<int> k_selected;
  std::optional<bool> k_correct;
  std::optional<double> wall_ms;
  /// Failure reason or warnings; not part of the CSV.
  std::vector<std::string> messages;
};

struct ExperimentResult {
  std::vector<ResultRecord> records;
};

/// Per-replication seed: a stable hash of master seed, experiment id, sweep
/// value and replication index.
std::uint64_t replication_seed(const ExperimentConfig& cfg, double param_value, int replication);

/// Runs every (sweep value, replication) on `cfg.workers` threads. Records
/// come back ordered by (sweep value, replication, method) regardless of
/// worker count. A failed fit becomes a record with ok == false.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the results CSV (header row included).
void write_results_csv(std::ostream& out, const ExperimentResult& res);
ExperimentResult read_results_csv(std::istream& in);

struct SummaryRow {
  std::string experiment;
  std::string param_name;
  double param_value = 0.0;
  std::string method;
  int n_ok = 0;
  int n_failed = 0;
  // mean / sample sd pairs; nullopt when no successful replication.
  std::optional<double> clustering_error_mean, clustering_error_sd;
  std::optional<double> hamming_error_mean, hamming_error_sd;
  std::optional<double> nmi_mean, nmi_sd;
  std::optional<double> ari_mean, ari_sd;
  std::optional<double> rel_l2_error_mean, rel_l2_error_sd;
  std::optional<double> accuracy_rate;
  std::optional<double> wall_ms_mean;
};

/// Per (sweep value, method): means and sample standard deviations (n - 1)
/// over successful replications, and the K-selection accuracy rate.
std::vector<SummaryRow> summarize(const ExperimentResult& res);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Mean and sample standard deviation; sd is 0 for a single value.
std::pair<double, double> mean_and_sd(const std::vector<double>& values);

}  // namespace mllcm
