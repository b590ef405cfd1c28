#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mllcm/aggregate.hpp"
#include "mllcm/model.hpp"

namespace mllcm::io {

namespace fs = std::filesystem;

/// Comma-separated, no header. `integral` writes entries as integers,
/// otherwise with 12 significant digits.
void write_matrix_csv(const fs::path& path, const Matrix& m, bool integral = false);
Matrix read_matrix_csv(const fs::path& path);

/// One 1-based label per line.
void write_labels(const fs::path& path, const Partition& p);
Partition read_labels(const fs::path& path);

/// "layer_001.csv", "theta_012.csv", ...
std::string layer_file_name(const std::string& stem, int one_based_index);

struct Dataset {
  ResponseTensor responses;
  std::optional<int> n_classes;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  /// Present when the directory carries labels.csv.
  std::optional<Partition> truth;
  /// Present when the directory carries theta_###.csv files.
  std::optional<std::vector<Matrix>> thetas;
};

/// Writes meta.json, layer_###.csv and, when present, labels.csv and theta_###.csv.
void write_dataset(const fs::path& dir, const Dataset& ds);

/// Reads a dataset directory and checks responses are integers in [0, M].
Dataset read_dataset(const fs::path& dir);

/// One CSV per matrix of `theta_###.csv` form under `dir`.
void write_thetas(const fs::path& dir, const std::vector<Matrix>& thetas);
std::vector<Matrix> read_thetas(const fs::path& dir);

void write_aggregates(const fs::path& dir, const AggregationBundle& agg);

}  // namespace mllcm::io
