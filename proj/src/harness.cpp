#include "mllcm/harness.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mllcm/aggregate.hpp"
#include "mllcm/error.hpp"
#include "mllcm/model_select.hpp"

namespace mllcm {

namespace {

const char* const kResultsHeader =
    "experiment,param_name,param_value,replication,seed,method,clustering_error,hamming_error,"
    "nmi,ari,rel_l2_error,k_selected,k_correct,status,wall_ms";

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

std::optional<double> parse_opt(const std::string& s) {
  if (s == "NA" || s.empty()) return std::nullopt;
  return std::stod(s);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Work for one (sweep value, replication): all configured methods.
std::vector<ResultRecord> run_replication(const ExperimentConfig& cfg, double value, int rep) {
  const ModelParams params = cfg.params_at(value);
  const std::uint64_t seed = replication_seed(cfg, value, rep);
  std::vector<ResultRecord> out;
  auto blank = [&](Method m) {
    ResultRecord rec;
    rec.experiment = cfg.id;
    rec.param_name = cfg.param_name;
    rec.param_value = value;
    rec.replication = rep;
    rec.seed = seed;
    rec.method = m;
    return rec;
  };

  SyntheticInstance inst;
  try {
    inst = simulate(params, seed);
  } catch (const std::exception& e) {
    for (Method m : cfg.methods) {
      auto rec = blank(m);
      rec.messages.push_back(std::string("simulation failed: ") + e.what());
      out.push_back(std::move(rec));
    }
    return out;
  }

  std::optional<ModularityIngredients> ing;
  if (cfg.select_k) ing = build_modularity_ingredients(inst.responses);
  const Rng rep_rng(seed);

  for (Method m : cfg.methods) {
    auto rec = blank(m);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Estimator est(inst.responses, m);
      Rng fit_rng = rep_rng.child("fit:" + method_name(m));
      FitResult fit = est.fit(params.n_classes, fit_rng, cfg.kmeans);
      rec.metrics = score(inst.truth, fit.z_hat, &inst.thetas.thetas, &fit.theta_hats);
      rec.messages = std::move(fit.warnings);
      if (cfg.select_k) {
        Rng sel_rng = rep_rng.child("select-k:" + method_name(m));
        const ModularityCurve curve = select_k(est, *ing, cfg.k_min, cfg.k_max, sel_rng, cfg.kmeans);
        rec.k_selected = curve.k_star;
        rec.k_correct = curve.k_star == params.n_classes;
      }
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.metrics = {};
      rec.k_selected.reset();
      rec.k_correct.reset();
      rec.messages.push_back(e.what());
    }
    if (cfg.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                        .count();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

ModelParams ExperimentConfig::params_at(double value) const {
  ModelParams p = base;
  if (param_name == "N") {
    p.n_subjects = static_cast<int>(std::lround(value));
  } else if (param_name == "L") {
    p.n_layers = static_cast<int>(std::lround(value));
  } else if (param_name == "rho") {
    p.rho = value;
  } else {
    throw InvalidArgument("unknown sweep parameter: " + param_name);
  }
  if (items_divisor) p.n_items = p.n_subjects / *items_divisor;
  return p;
}

void ExperimentConfig::validate() const {
  require(!id.empty() && id.find(',') == std::string::npos, "experiment id must be nonempty and comma-free");
  require(param_name == "N" || param_name == "L" || param_name == "rho",
          "sweep parameter must be N, L or rho");
  require(!param_values.empty(), "sweep has no values");
  require(replications >= 1, "replications must be at least 1");
  require(!methods.empty(), "no methods configured");
  require(workers >= 1, "workers must be at least 1");
  require(!items_divisor || *items_divisor >= 1, "items_divisor must be positive");
  for (double v : param_values) {
    if (param_name != "rho") require(v == std::round(v), param_name + " values must be integers");
    const ModelParams p = params_at(v);
    if (items_divisor) {
      require(p.n_subjects % *items_divisor == 0,
              "N = " + std::to_string(p.n_subjects) + " is not divisible by items_divisor");
    }
    p.validate();
    if (select_k) {
      require(k_min >= 1 && k_min <= k_max && k_max <= std::min(p.n_subjects, p.n_items),
              "k range must satisfy 1 <= k_min <= k_max <= min(N, J)");
    }
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.id = j.value("id", c.id);
    if (j.contains("base")) {
      const auto& b = j["base"];
      c.base.n_subjects = b.value("N", c.base.n_subjects);
      c.base.n_items = b.value("J", c.base.n_items);
      c.base.n_classes = b.value("K", c.base.n_classes);
      c.base.n_layers = b.value("L", c.base.n_layers);
      c.base.max_level = b.value("M", c.base.max_level);
      c.base.rho = b.value("rho", c.base.rho);
    }
    if (j.contains("items_divisor")) {
      if (j["items_divisor"].is_null()) {
        c.items_divisor.reset();
      } else {
        c.items_divisor = j["items_divisor"].get<int>();
      }
    }
    c.param_name = j.at("param_name").get<std::string>();
    c.param_values = j.at("param_values").get<std::vector<double>>();
    c.replications = j.value("replications", c.replications);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    c.select_k = j.value("select_k", c.select_k);
    c.k_min = j.value("k_min", c.k_min);
    c.k_max = j.value("k_max", c.k_max);
    if (j.contains("kmeans")) {
      const auto& k = j["kmeans"];
      c.kmeans.restarts = k.value("restarts", c.kmeans.restarts);
      c.kmeans.max_iters = k.value("max_iters", c.kmeans.max_iters);
      c.kmeans.tol = k.value("tol", c.kmeans.tol);
    }
    c.workers = j.value("workers", c.workers);
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["base"] = {{"N", base.n_subjects}, {"J", base.n_items},   {"K", base.n_classes},
               {"L", base.n_layers},   {"M", base.max_level}, {"rho", base.rho}};
  if (items_divisor) {
    j["items_divisor"] = *items_divisor;
  } else {
    j["items_divisor"] = nullptr;
  }
  j["param_name"] = param_name;
  j["param_values"] = param_values;
  j["replications"] = replications;
  j["master_seed"] = master_seed;
  std::vector<std::string> names;
  for (Method m : methods) names.push_back(method_name(m));
  j["methods"] = names;
  j["select_k"] = select_k;
  j["k_min"] = k_min;
  j["k_max"] = k_max;
  j["kmeans"] = {{"restarts", kmeans.restarts}, {"max_iters", kmeans.max_iters}, {"tol", kmeans.tol}};
  j["workers"] = workers;
  j["record_wall_time"] = record_wall_time;
  return j;
}

ExperimentConfig preset(const std::string& name) {
  const bool desk = name.size() > 5 && name.substr(name.size() - 5) == "-desk";
  const std::string base_name = desk ? name.substr(0, name.size() - 5) : name;
  ExperimentConfig c;
  c.id = name;
  c.base = ModelParams{500, 100, 3, 10, 5, 0.1};
  c.items_divisor = 5;
  c.replications = desk ? 10 : 50;
  c.select_k = true;
  c.k_min = 1;
  c.k_max = 8;
  if (base_name == "exp1") {
    c.param_name = "N";
    c.param_values = desk ? std::vector<double>{100, 300, 500}
                          : std::vector<double>{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    c.select_k = !desk;
  } else if (base_name == "exp2") {
    c.param_name = "L";
    c.param_values = desk ? std::vector<double>{2, 10, 20}
                          : std::vector<double>{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    c.select_k = !desk;
  } else if (base_name == "exp3") {
    c.param_name = "rho";
    c.param_values = desk ? std::vector<double>{0.02, 0.1, 0.2}
                          : std::vector<double>{0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
    c.select_k = !desk;
  } else if (base_name == "ksel") {
    c.param_name = "N";
    c.param_values = {1000};
    c.base.rho = 0.2;
    c.replications = 20;
    c.methods = {Method::DSoG};
    c.k_max = 6;
  } else {
    throw InvalidArgument("unknown preset: " + name);
  }
  c.validate();
  return c;
}

std::uint64_t replication_seed(const ExperimentConfig& cfg, double param_value, int replication) {
  std::uint64_t h = derive_seed(cfg.master_seed, cfg.id);
  h = derive_seed(h, "param", std::bit_cast<std::uint64_t>(param_value));
  return derive_seed(h, "replication", static_cast<std::uint64_t>(replication));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    double value;
    int rep;
  };
  std::vector<Task> tasks;
  for (double v : cfg.param_values)
    for (int r = 0; r < cfg.replications; ++r) tasks.push_back({v, r});

  std::vector<std::vector<ResultRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      slots[t] = run_replication(cfg, tasks[t].value, tasks[t].rep);
    }
  };
  const int n_threads = std::min<int>(cfg.workers, static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult res;
  for (auto& slot : slots)
    for (auto& rec : slot) res.records.push_back(std::move(rec));
  const std::size_t expected = tasks.size() * cfg.methods.size();
  if (res.records.size() != expected) {
    throw std::logic_error("record count " + std::to_string(res.records.size()) + " != " +
                           std::to_string(expected));
  }
  return res;
}

void write_results_csv(std::ostream& out, const ExperimentResult& res) {
  out << kResultsHeader << '\n';
  for (const auto& r : res.records) {
    std::optional<double> ce, he, nm, ar, rl;
    if (r.ok) {
      ce = r.metrics.clustering_error;
      he = r.metrics.hamming_error;
      nm = r.metrics.nmi;
      ar = r.metrics.ari;
      rl = r.metrics.relative_l2_error;
    }
    out << r.experiment << ',' << r.param_name << ',' << fmt(r.param_value) << ',' << r.replication
        << ',' << r.seed << ',' << method_name(r.method) << ',' << fmt(ce) << ',' << fmt(he) << ','
        << fmt(nm) << ',' << fmt(ar) << ',' << fmt(rl) << ','
        << (r.k_selected ? std::to_string(*r.k_selected) : "NA") << ','
        << (r.k_correct ? (*r.k_correct ? "1" : "0") : "NA") << ',' << (r.ok ? "ok" : "failed")
        << ',' << fmt(r.wall_ms) << '\n';
  }
}

ExperimentResult read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("results CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kResultsHeader, "results CSV header does not match the expected schema");
  ExperimentResult res;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    require(f.size() == 15, "results CSV line " + std::to_string(line_no) + ": expected 15 fields");
    try {
      ResultRecord r;
      r.experiment = f[0];
      r.param_name = f[1];
      r.param_value = std::stod(f[2]);
      r.replication = std::stoi(f[3]);
      r.seed = std::stoull(f[4]);
      r.method = parse_method(f[5]);
      r.ok = f[13] == "ok";
      require(r.ok || f[13] == "failed", "bad status");
      if (r.ok) {
        r.metrics.clustering_error = std::stod(f[6]);
        r.metrics.hamming_error = std::stod(f[7]);
        r.metrics.nmi = std::stod(f[8]);
        r.metrics.ari = std::stod(f[9]);
        r.metrics.relative_l2_error = parse_opt(f[10]);
      }
      if (f[11] != "NA") r.k_selected = std::stoi(f[11]);
      if (f[12] != "NA") r.k_correct = f[12] == "1";
      r.wall_ms = parse_opt(f[14]);
      res.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw InvalidArgument("results CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return res;
}

std::pair<double, double> mean_and_sd(const std::vector<double>& values) {
  require(!values.empty(), "no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (values.size() - 1))};
}

std::vector<SummaryRow> summarize(const ExperimentResult& res) {
  require(!res.records.empty(), "cannot summarize an empty result set");
  // Groups keep first-appearance order, which is sweep order then method order.
  std::vector<std::pair<std::string, std::vector<const ResultRecord*>>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : res.records) {
    const std::string key = r.experiment + '\x1f' + fmt(r.param_value) + '\x1f' + method_name(r.method);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].second.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, recs] : groups) {
    SummaryRow row;
    row.experiment = recs.front()->experiment;
    row.param_name = recs.front()->param_name;
    row.param_value = recs.front()->param_value;
    row.method = method_name(recs.front()->method);
    std::vector<double> ce, he, nm, ar, rl, wall;
    std::vector<int> k_hits;
    for (const auto* r : recs) {
      if (!r->ok) {
        ++row.n_failed;
        continue;
      }
      ++row.n_ok;
      ce.push_back(r->metrics.clustering_error);
      he.push_back(r->metrics.hamming_error);
      nm.push_back(r->metrics.nmi);
      ar.push_back(r->metrics.ari);
      if (r->metrics.relative_l2_error) rl.push_back(*r->metrics.relative_l2_error);
      if (r->k_correct) k_hits.push_back(*r->k_correct ? 1 : 0);
      if (r->wall_ms) wall.push_back(*r->wall_ms);
    }
    auto fill = [](const std::vector<double>& v, std::optional<double>& mean, std::optional<double>& sd) {
      if (v.empty()) return;
      const auto [m, s] = mean_and_sd(v);
      mean = m;
      sd = s;
    };
    fill(ce, row.clustering_error_mean, row.clustering_error_sd);
    fill(he, row.hamming_error_mean, row.hamming_error_sd);
    fill(nm, row.nmi_mean, row.nmi_sd);
    fill(ar, row.ari_mean, row.ari_sd);
    fill(rl, row.rel_l2_error_mean, row.rel_l2_error_sd);
    if (!k_hits.empty()) {
      row.accuracy_rate = accuracy_rate(k_hits, 1);
    }
    if (!wall.empty()) row.wall_ms_mean = mean_and_sd(wall).first;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "experiment,param_name,param_value,method,n_ok,n_failed,clustering_error_mean,"
         "clustering_error_sd,hamming_error_mean,hamming_error_sd,nmi_mean,nmi_sd,ari_mean,ari_sd,"
         "rel_l2_error_mean,rel_l2_error_sd,accuracy_rate,wall_ms_mean\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.param_name << ',' << fmt(r.param_value) << ',' << r.method << ','
        << r.n_ok << ',' << r.n_failed << ',' << fmt(r.clustering_error_mean) << ','
        << fmt(r.clustering_error_sd) << ',' << fmt(r.hamming_error_mean) << ','
        << fmt(r.hamming_error_sd) << ',' << fmt(r.nmi_mean) << ',' << fmt(r.nmi_sd) << ','
        << fmt(r.ari_mean) << ',' << fmt(r.ari_sd) << ',' << fmt(r.rel_l2_error_mean) << ','
        << fmt(r.rel_l2_error_sd) << ',' << fmt(r.accuracy_rate) << ',' << fmt(r.wall_ms_mean) << '\n';
  }
}

}  // namespace mllcm
