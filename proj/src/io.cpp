#include "mllcm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mllcm/error.hpp"

namespace mllcm::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  return in;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string layer_file_name(const std::string& stem, int one_based_index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.csv", stem.c_str(), one_based_index);
  return buf;
}

void write_matrix_csv(const fs::path& path, const Matrix& m, bool integral) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      if (integral) {
        out << static_cast<long long>(std::llround(m(i, j)));
      } else {
        out << format_real(m(i, j));
      }
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        require(cell.find_first_not_of(" \t", used) == std::string::npos, "");
      } catch (const std::exception&) {
        throw InvalidArgument(path.string() + ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument(path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), path.string() + ": empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_labels(const fs::path& path, const Partition& p) {
  auto out = open_out(path);
  for (int l : p.one_based()) out << l << '\n';
}

Partition read_labels(const fs::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(line, &used));
      require(used == line.size(), "");
    } catch (const std::exception&) {
      throw InvalidArgument(path.string() + ": bad label '" + line + "'");
    }
  }
  return Partition::from_one_based(labels);
}

void write_thetas(const fs::path& dir, const std::vector<Matrix>& thetas) {
  for (std::size_t l = 0; l < thetas.size(); ++l) {
    write_matrix_csv(dir / layer_file_name("theta", static_cast<int>(l + 1)), thetas[l]);
  }
}

std::vector<Matrix> read_thetas(const fs::path& dir) {
  std::vector<Matrix> out;
  for (int l = 1; fs::exists(dir / layer_file_name("theta", l)); ++l) {
    out.push_back(read_matrix_csv(dir / layer_file_name("theta", l)));
  }
  require(!out.empty(), dir.string() + ": no theta_###.csv files");
  return out;
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  ds.responses.validate(true);
  fs::create_directories(dir);
  nlohmann::ordered_json meta;
  meta["N"] = ds.responses.n_subjects();
  meta["J"] = ds.responses.n_items();
  meta["L"] = ds.responses.n_layers();
  meta["M"] = ds.responses.max_level;
  if (ds.n_classes) meta["K"] = *ds.n_classes;
  if (ds.rho) meta["rho"] = *ds.rho;
  if (ds.seed) meta["seed"] = *ds.seed;
  open_out(dir / "meta.json") << meta.dump(2) << '\n';
  for (int l = 0; l < ds.responses.n_layers(); ++l) {
    write_matrix_csv(dir / layer_file_name("layer", l + 1), ds.responses.layers[l], true);
  }
  if (ds.truth) write_labels(dir / "labels.csv", *ds.truth);
  if (ds.thetas) write_thetas(dir, *ds.thetas);
}

Dataset read_dataset(const fs::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(open_in(dir / "meta.json"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }
  Dataset ds;
  int n, j, l;
  try {
    n = meta.at("N").get<int>();
    j = meta.at("J").get<int>();
    l = meta.at("L").get<int>();
    ds.responses.max_level = meta.at("M").get<int>();
    if (meta.contains("K")) ds.n_classes = meta["K"].get<int>();
    if (meta.contains("seed")) ds.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("rho")) ds.rho = meta["rho"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }
  require(l >= 1, "meta.json: L must be positive");
  for (int layer = 1; layer <= l; ++layer) {
    Matrix r = read_matrix_csv(dir / layer_file_name("layer", layer));
    require(r.rows() == n && r.cols() == j,
            layer_file_name("layer", layer) + ": shape disagrees with meta.json");
    ds.responses.layers.push_back(std::move(r));
  }
  ds.responses.validate(true);
  if (fs::exists(dir / "labels.csv")) ds.truth = read_labels(dir / "labels.csv");
  if (fs::exists(dir / layer_file_name("theta", 1))) ds.thetas = read_thetas(dir);
  return ds;
}

void write_aggregates(const fs::path& dir, const AggregationBundle& agg) {
  fs::create_directories(dir);
  write_matrix_csv(dir / "r_sum.csv", agg.r_sum);
  write_matrix_csv(dir / "s_sum.csv", agg.s_sum);
  write_matrix_csv(dir / "s_sum_debiased.csv", agg.s_sum_debiased);
}

}  // namespace mllcm::io
