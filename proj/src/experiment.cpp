#include "domino/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "domino/errors.hpp"
#include "domino/percolation.hpp"
#include "domino/rng.hpp"
#include "domino/stats.hpp"

namespace domino {
namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Array: return "array";
    case ExperimentKind::Cascade: return "cascade";
    case ExperimentKind::Percolation: return "percolation";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "unknown";
}

std::string to_string(BaselinePolicy policy) {
  switch (policy) {
    case BaselinePolicy::Capped: return "capped";
    case BaselinePolicy::Feasible: return "feasible";
    case BaselinePolicy::Nominal: return "nominal";
  }
  return "unknown";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// --------------------------------------------------------------------------
// Config parsing

namespace {

std::string key_path(const std::string& key) { return "/" + key; }

double number(const json& v, const std::string& path) {
  if (v.is_string() && v.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

double finite_number(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = finite_number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be > 0");
  return x;
}

double non_negative(const json& v, const std::string& path) {
  const double x = finite_number(v, path);
  if (!(x >= 0.0)) throw ConfigError(path, "must be >= 0");
  return x;
}

std::size_t count(const json& v, const std::string& path, std::size_t min_value) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < static_cast<long long>(min_value)) {
    throw ConfigError(path, "must be >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(x);
}

std::vector<double> number_list(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(path, "list must be nonempty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(finite_number(v[i], path + "/" + std::to_string(i)));
    }
  } else {
    out.push_back(finite_number(v, path));
  }
  return out;
}

ExperimentKind parse_kind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const auto s = v.get<std::string>();
  if (s == "array") return ExperimentKind::Array;
  if (s == "cascade") return ExperimentKind::Cascade;
  if (s == "percolation") return ExperimentKind::Percolation;
  if (s == "sweep") return ExperimentKind::Sweep;
  throw ConfigError(path, "unknown experiment '" + s + "' (array|cascade|percolation|sweep)");
}

BaselinePolicy parse_baseline(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const auto s = v.get<std::string>();
  if (s == "capped") return BaselinePolicy::Capped;
  if (s == "feasible") return BaselinePolicy::Feasible;
  if (s == "nominal") return BaselinePolicy::Nominal;
  throw ConfigError(path, "unknown baseline '" + s + "' (capped|feasible|nominal)");
}

json inf_aware(double x) {
  return std::isinf(x) ? json("inf") : json(x);
}

std::vector<double> default_a1_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  return grid;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!doc.contains("experiment")) throw ConfigError("/experiment", "missing experiment kind");
  if (doc.contains("delta") && doc.contains("delta_db")) {
    throw ConfigError("/delta_db", "give either delta or delta_db, not both");
  }

  ExperimentConfig c;
  using Handler = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      {"experiment", [&](const json& v, const std::string& p) { c.experiment = parse_kind(v, p); }},
      {"seed",
       [&](const json& v, const std::string& p) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
           throw ConfigError(p, "expected a non-negative integer");
         }
         c.seed = v.get<std::uint64_t>();
       }},
      {"output_dir",
       [&](const json& v, const std::string& p) {
         if (!v.is_string() || v.get<std::string>().empty()) {
           throw ConfigError(p, "expected a nonempty path");
         }
         c.output_dir = v.get<std::string>();
       }},
      {"workers",
       [&](const json& v, const std::string& p) { c.workers = static_cast<unsigned>(count(v, p, 0)); }},
      {"alpha",
       [&](const json& v, const std::string& p) {
         c.alpha = positive(v, p);
         if (!(c.alpha > 1.0)) throw ConfigError(p, "must be > 1");
       }},
      {"lambda", [&](const json& v, const std::string& p) { c.lambda = non_negative(v, p); }},
      {"beta", [&](const json& v, const std::string& p) { c.beta = positive(v, p); }},
      {"d_ii", [&](const json& v, const std::string& p) { c.d_ii = positive(v, p); }},
      {"noise", [&](const json& v, const std::string& p) { c.noise = non_negative(v, p); }},
      {"window",
       [&](const json& v, const std::string& p) {
         if (!v.is_array() || v.size() != 2) throw ConfigError(p, "expected [width, height]");
         c.window_width = positive(v[0], p + "/0");
         c.window_height = positive(v[1], p + "/1");
       }},
      {"Delta", [&](const json& v, const std::string& p) { c.delta_update = positive(v, p); }},
      {"delta",
       [&](const json& v, const std::string& p) {
         c.deltas = number_list(v, p);
         for (std::size_t i = 0; i < c.deltas.size(); ++i) {
           if (!(c.deltas[i] > 0.0)) {
             throw ConfigError(v.is_array() ? p + "/" + std::to_string(i) : p, "must be > 0");
           }
         }
       }},
      {"delta_db",
       [&](const json& v, const std::string& p) {
         c.deltas = number_list(v, p);
         for (double& d : c.deltas) d = db_to_linear(d);
       }},
      {"p_max",
       [&](const json& v, const std::string& p) {
         c.p_max = number(v, p);
         if (!(c.p_max > 0.0)) throw ConfigError(p, "must be > 0");
       }},
      {"trials", [&](const json& v, const std::string& p) { c.trials = count(v, p, 1); }},
      {"max_rounds", [&](const json& v, const std::string& p) { c.max_rounds = count(v, p, 1); }},
      {"baseline", [&](const json& v, const std::string& p) { c.baseline = parse_baseline(v, p); }},
      {"baseline_cap", [&](const json& v, const std::string& p) { c.baseline_cap = positive(v, p); }},
      {"resample_budget",
       [&](const json& v, const std::string& p) { c.resample_budget = count(v, p, 1); }},
      {"origin_guard",
       [&](const json& v, const std::string& p) { c.origin_guard = non_negative(v, p); }},
      {"a1", [&](const json& v, const std::string& p) { c.a1 = positive(v, p); }},
      {"a1_grid",
       [&](const json& v, const std::string& p) {
         c.a1_grid = number_list(v, p);
         for (std::size_t i = 0; i < c.a1_grid.size(); ++i) {
           if (!(c.a1_grid[i] > 0.0)) throw ConfigError(p + "/" + std::to_string(i), "must be > 0");
         }
       }},
      {"n_max", [&](const json& v, const std::string& p) { c.n_max = count(v, p, 1); }},
      {"threshold_n_max",
       [&](const json& v, const std::string& p) { c.threshold_n_max = count(v, p, 200); }},
      {"threshold_tol", [&](const json& v, const std::string& p) { c.threshold_tol = positive(v, p); }},
      {"delta_n_terms", [&](const json& v, const std::string& p) { c.delta_n_terms = count(v, p, 10); }},
      {"lattice_cells", [&](const json& v, const std::string& p) { c.lattice_cells = count(v, p, 50); }},
      {"lattice_trials", [&](const json& v, const std::string& p) { c.lattice_trials = count(v, p, 1); }},
      {"lattice_edge_probabilities",
       [&](const json& v, const std::string& p) {
         c.lattice_edge_probabilities = number_list(v, p);
         for (std::size_t i = 0; i < c.lattice_edge_probabilities.size(); ++i) {
           const double q = c.lattice_edge_probabilities[i];
           if (!(q >= 0.0 && q < 1.0)) throw ConfigError(p + "/" + std::to_string(i), "must be in [0, 1)");
         }
       }},
  };

  for (const auto& [key, value] : doc.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(key_path(key), "unknown key");
    it->second(value, key_path(key));
  }
  if (c.a1_grid.empty()) c.a1_grid = default_a1_grid();
  if (c.experiment == ExperimentKind::Percolation && !doc.contains("delta") &&
      !doc.contains("delta_db")) {
    c.deltas = {0.01};
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json doc = {{"experiment", to_string(c.experiment)},
              {"seed", c.seed},
              {"output_dir", c.output_dir},
              {"workers", c.workers},
              {"alpha", c.alpha},
              {"lambda", c.lambda},
              {"beta", c.beta},
              {"d_ii", c.d_ii},
              {"noise", c.noise},
              {"window", {c.window_width, c.window_height}},
              {"Delta", c.delta_update},
              {"delta", c.deltas},
              {"p_max", inf_aware(c.p_max)},
              {"trials", c.trials},
              {"max_rounds", c.max_rounds},
              {"baseline", to_string(c.baseline)},
              {"baseline_cap", c.baseline_cap},
              {"resample_budget", c.resample_budget},
              {"a1", c.a1},
              {"a1_grid", c.a1_grid},
              {"n_max", c.n_max},
              {"threshold_n_max", c.threshold_n_max},
              {"threshold_tol", c.threshold_tol},
              {"delta_n_terms", c.delta_n_terms},
              {"lattice_cells", c.lattice_cells},
              {"lattice_trials", c.lattice_trials},
              {"lattice_edge_probabilities", c.lattice_edge_probabilities}};
  if (c.origin_guard) doc["origin_guard"] = *c.origin_guard;
  return doc;
}

// --------------------------------------------------------------------------
// Output

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

namespace {

class OutputWriter {
 public:
  explicit OutputWriter(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, const std::string& bytes) {
    const fs::path target = root_ / relative;
    fs::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + target.string());
    out << bytes;
    if (!out) throw std::runtime_error("write failed for " + target.string());
    files_.push_back({relative, sha256_hex(bytes), bytes.size()});
  }

  void write_json(const std::string& relative, const json& doc) { write(relative, doc.dump(2) + "\n"); }

  std::vector<OutputFile>& files() { return files_; }

 private:
  fs::path root_;
  std::vector<OutputFile> files_;
};

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.precision(17);
  return out;
}

// --- array ------------------------------------------------------------------

void run_array(const ExperimentConfig& c, OutputWriter& out) {
  json results = json::array();
  auto seq = csv_stream();
  seq << "# schema: domino-array-sequence v1\n";
  seq << "delta,n,a_n\n";
  for (double delta : c.deltas) {
    const ArrayResult r = array_cascade(c.a1, delta, c.alpha, c.n_max);
    for (std::size_t n = 0; n < r.a.size(); ++n) seq << delta << ',' << n << ',' << r.a[n] << '\n';
    results.push_back({{"delta", delta},
                       {"outcome", to_string(r.outcome)},
                       {"affected_count", r.affected_count},
                       {"n_evaluated", r.n_evaluated}});
  }
  out.write("array_sequence.csv", seq.str());
  out.write_json("array.json", {{"schema", "domino-array v1"},
                                {"a1", c.a1},
                                {"alpha", c.alpha},
                                {"n_max", c.n_max},
                                {"critical_coupling", critical_coupling(c.alpha)},
                                {"results", results}});
}

void run_sweep(const ExperimentConfig& c, OutputWriter& out) {
  const SweepTable table = sweep_affected_counts(c.a1_grid, c.deltas, c.alpha, c.n_max, c.workers);
  out.write("array_sweep.csv", sweep_csv(table));
  json thresholds = json::array();
  for (double delta : c.deltas) {
    thresholds.push_back(
        {{"delta", delta},
         {"a1_star", find_divergence_threshold(delta, c.alpha, c.threshold_tol, c.threshold_n_max)}});
  }
  out.write_json("array_thresholds.json", {{"schema", "domino-array-thresholds v1"},
                                           {"alpha", c.alpha},
                                           {"n_max", c.threshold_n_max},
                                           {"tol", c.threshold_tol},
                                           {"critical_coupling", critical_coupling(c.alpha)},
                                           {"thresholds", thresholds}});
}

// --- percolation ------------------------------------------------------------

void run_percolation(const ExperimentConfig& c, OutputWriter& out) {
  const PercolationParams params{c.delta_update, c.deltas.front(), c.beta, c.d_ii, c.alpha};
  std::vector<PercolationBounds> all;
  json per_delta = json::array();
  for (double delta : c.deltas) {
    PercolationParams p = params;
    p.delta = delta;
    all.push_back(percolation_bounds(p, c.delta_n_terms));
    per_delta.push_back(to_json(all.back()));
  }
  json bounds = to_json(all.front());
  bounds["schema"] = "domino-bounds v1";
  bounds["lambda"] = c.lambda;
  bounds["per_delta"] = per_delta;
  out.write_json("bounds.json", bounds);

  auto csv = csv_stream();
  csv << "# schema: domino-percolation-mc v1\n";
  csv << "trial,lambda,p_edge_theory,p_edge_empirical,spanning,largest_cluster_fraction\n";
  const double cell = all.front().cell;
  std::vector<double> lambdas{c.lambda};
  for (double q : c.lattice_edge_probabilities) lambdas.push_back(-std::log1p(-q) / (cell * cell));
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const LatticeConfig lc{lambdas[k], cell, c.lattice_cells};
    const auto rows =
        lattice_percolation_mc(lc, c.lattice_trials, derive_seed(c.seed, k), c.workers);
    for (const auto& r : rows) {
      csv << r.trial << ',' << r.lambda << ',' << r.p_edge_theory << ',' << r.p_edge_empirical
          << ',' << (r.spanning ? 1 : 0) << ',' << r.largest_cluster_fraction << '\n';
    }
  }
  out.write("percolation_mc.csv", csv.str());
}

// --- cascade ----------------------------------------------------------------

std::string delta_label(double delta) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << linear_to_db(delta) << " dB";
  return s.str();
}

void run_cascade_experiment(const ExperimentConfig& c, OutputWriter& out) {
  const PathLossModel law{c.alpha};
  const double min_delta = *std::min_element(c.deltas.begin(), c.deltas.end());

  EnsembleParams params;
  params.network = {c.d_ii, c.beta, c.deltas.front(), c.noise, law,
                    Window{c.window_width, c.window_height}, c.lambda};
  params.baseline = c.baseline;
  params.baseline_cap = c.baseline_cap;
  params.resample_budget = c.resample_budget;
  params.origin_guard = c.origin_guard.value_or(
      affected_radius(c.delta_update, c.beta, c.d_ii, min_delta, law) + c.d_ii);
  params.workers = c.workers;

  std::vector<CascadeConfig> configs;
  for (double delta : c.deltas) {
    CascadeConfig cc;
    cc.delta_update = c.delta_update;
    cc.threshold = delta;
    cc.p_max = c.p_max;
    cc.max_rounds = c.max_rounds;
    configs.push_back(cc);
  }
  const auto ensembles = monte_carlo_cascades(params, configs, c.trials, c.seed);

  auto trials_csv = csv_stream();
  trials_csv << "# schema: domino-cascade-trials v1\n";
  trials_csv << "delta,trial,seed,N,origin,total_affected,rounds,clipped_count,truncated,a1,"
                "mean_db_changed,mean_db_all,redraws\n";
  auto rounds_csv = csv_stream();
  rounds_csv << "# schema: domino-round-counts v1\n";
  rounds_csv << "delta,trial,round_index,count\n";

  json fits = {{"schema", "domino-fits v1"}, {"lambda", c.lambda}, {"per_delta", json::array()}};
  for (std::size_t d = 0; d < ensembles.size(); ++d) {
    const Ensemble& e = ensembles[d];
    const double delta = c.deltas[d];
    std::vector<std::vector<std::size_t>> round_counts;
    std::vector<std::size_t> first;
    CompensatedSum db_changed;
    CompensatedSum db_all;
    std::size_t changed = 0;
    std::size_t truncated = 0;
    for (const TrialSummary& s : e.trials) {
      trials_csv << delta << ',' << s.trial << ',' << s.seed << ',' << s.n_links << ',' << s.origin
                 << ',' << s.total_affected << ',' << s.rounds() << ',' << s.clipped_count << ','
                 << (s.truncated ? 1 : 0) << ',' << s.first_round() << ',' << s.mean_db_changed
                 << ',' << s.mean_db_all << ',' << s.redraws << '\n';
      for (std::size_t k = 0; k < s.round_counts.size(); ++k) {
        rounds_csv << delta << ',' << s.trial << ',' << k + 1 << ',' << s.round_counts[k] << '\n';
      }
      round_counts.push_back(s.round_counts);
      first.push_back(s.first_round());
      if (s.total_affected > 0 && std::isfinite(s.mean_db_changed)) {
        db_changed.add(s.mean_db_changed * static_cast<double>(s.total_affected));
        changed += s.total_affected;
      }
      if (std::isfinite(s.mean_db_all)) db_all.add(s.mean_db_all);
      truncated += s.truncated ? 1 : 0;
    }

    const RoundDistributions dist = round_count_distributions(round_counts);
    const std::string label = delta_label(delta);
    out.write("histograms/total_d" + std::to_string(d) + ".csv",
              histogram_csv(dist.total, "schema: domino-histogram v1; metric=total; delta=" + label));
    json hist_files = {{"total", "histograms/total_d" + std::to_string(d) + ".csv"},
                       {"rounds", json::array()}};
    for (std::size_t k = 0; k < dist.per_round.size(); ++k) {
      const std::string name =
          "histograms/round" + std::to_string(k + 1) + "_d" + std::to_string(d) + ".csv";
      out.write(name, histogram_csv(dist.per_round[k], "schema: domino-histogram v1; metric=round" +
                                                           std::to_string(k + 1) + "; delta=" + label));
      hist_files["rounds"].push_back(name);
    }

    const double r_update = affected_radius(c.delta_update, c.beta, c.d_ii, delta, law);
    const double a1_mean = c.lambda * std::numbers::pi * r_update * r_update;
    json entry = {{"delta", delta},
                  {"delta_db", linear_to_db(delta)},
                  {"r_update", r_update},
                  {"a1_expected", a1_mean},
                  {"mean_total", dist.mean_total},
                  {"mean_per_round", dist.mean_per_round},
                  {"mean_db_changed", changed ? db_changed.value() / static_cast<double>(changed) : 0.0},
                  {"mean_db_all", e.trials.empty() ? 0.0 : db_all.value() / static_cast<double>(e.trials.size())},
                  {"truncated_trials", truncated},
                  {"redraws", e.redraws},
                  {"histograms", hist_files}};
    if (first.size() >= 30) {
      entry["a1_fit"] = to_json(poisson_fit(first));
      entry["a1_gof_analytic"] = to_json(poisson_gof(first, a1_mean));
      std::vector<std::size_t> totals;
      for (const auto& rc : round_counts) {
        totals.push_back(std::accumulate(rc.begin(), rc.end(), std::size_t{0}));
      }
      entry["total_fit"] = to_json(poisson_fit(totals));
    }
    const auto fractions = round_fractions(round_counts);
    entry["round_fractions"] = fractions;
    try {
      entry["powerlaw"] = to_json(powerlaw_fit(fractions));
    } catch (const InsufficientDataError&) {
      entry["powerlaw"] = nullptr;
    }
    fits["per_delta"].push_back(entry);
  }
  out.write("cascade_trials.csv", trials_csv.str());
  out.write("round_counts.csv", rounds_csv.str());
  out.write_json("fits.json", fits);
}

}  // namespace

Manifest run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root(config.output_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) {
    throw std::runtime_error("cannot create output directory " + root.string());
  }

  Manifest manifest;
  OutputWriter writer(root);
  auto write_manifest = [&] {
    manifest.files = writer.files();
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json files = json::array();
    for (const auto& f : manifest.files) {
      files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    json doc = {{"schema", "domino-manifest v1"},
                {"version", kVersion},
                {"status", manifest.status},
                {"config", to_json(config)},
                {"seed", config.seed},
                {"wall_time_s", manifest.wall_time_s},
                {"files", files}};
    if (!manifest.error.empty()) doc["error"] = manifest.error;
    std::ofstream out(root / "manifest.json", std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest in " + root.string());
  };

  try {
    switch (config.experiment) {
      case ExperimentKind::Array: run_array(config, writer); break;
      case ExperimentKind::Sweep: run_sweep(config, writer); break;
      case ExperimentKind::Percolation: run_percolation(config, writer); break;
      case ExperimentKind::Cascade: run_cascade_experiment(config, writer); break;
    }
  } catch (const std::exception& e) {
    manifest.status = "aborted";
    manifest.error = e.what();
    write_manifest();
    throw;
  }
  write_manifest();
  return manifest;
}

}  // namespace domino
