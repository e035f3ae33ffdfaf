#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "domino/errors.hpp"
#include "domino/experiment.hpp"

using namespace domino;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("domino_test_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> checksums(const Manifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& f : m.files) out[f.path] = f.sha256;
  return out;
}

std::string key_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config({{"experiment", "cascade"}});
  CHECK(c.experiment == ExperimentKind::Cascade);
  CHECK(c.alpha == 3.0);
  CHECK(c.lambda == 4e-4);
  CHECK(c.beta == 1.0);
  CHECK(c.d_ii == 10.0);
  CHECK(c.delta_update == 1.0);
  CHECK(c.noise == 1e-8);
  CHECK(c.p_max == 1.0);
  CHECK(c.deltas == std::vector<double>{0.1, 0.01, 0.001});
  CHECK(parse_config({{"experiment", "percolation"}}).deltas == std::vector<double>{0.01});
}

TEST_CASE("thresholds in dB") {
  const auto c = parse_config({{"experiment", "cascade"}, {"delta_db", -20}});
  REQUIRE(c.deltas.size() == 1);
  CHECK(c.deltas[0] == doctest::Approx(0.01).epsilon(1e-15));
  const auto l = parse_config({{"experiment", "array"}, {"delta_db", {-10, -30}}});
  CHECK(l.deltas[1] == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(parse_config({{"experiment", "cascade"}, {"p_max", "inf"}}).p_max ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("errors carry key paths") {
  CHECK(key_of({{"experiment", "cascade"}, {"lambda", -1.0}}) == "/lambda");
  CHECK(key_of({{"experiment", "cascade"}, {"bogus", 1}}) == "/bogus");
  CHECK(key_of({{"lambda", 1e-4}}) == "/experiment");
  CHECK(key_of({{"experiment", "fractal"}}) == "/experiment");
  CHECK(key_of({{"experiment", "cascade"}, {"window", {100, -1}}}) == "/window/1");
  CHECK(key_of({{"experiment", "cascade"}, {"delta", {0.1, -0.2}}}) == "/delta/1");
  CHECK(key_of({{"experiment", "cascade"}, {"trials", 0}}) == "/trials");
  CHECK(key_of({{"experiment", "cascade"}, {"delta", 0.1}, {"delta_db", -10}}) == "/delta_db");
}

TEST_CASE("config round trip") {
  auto c = parse_config({{"experiment", "sweep"},
                         {"seed", 12345},
                         {"delta_db", {-10, -20}},
                         {"p_max", "inf"},
                         {"window", {300, 400}},
                         {"origin_guard", 20.0},
                         {"baseline", "capped"}});
  const auto back = parse_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.origin_guard == c.origin_guard);
  CHECK(back.deltas == c.deltas);
  CHECK(db_to_linear(linear_to_db(0.37)) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("percolation output") {
  auto c = parse_config({{"experiment", "percolation"}, {"lattice_trials", 5}});
  c.output_dir = scratch("perc").string();
  const auto m = run_experiment(c);
  CHECK(m.status == "ok");
  std::ifstream in(fs::path(c.output_dir) / "bounds.json");
  const auto b = json::parse(in);
  CHECK(std::abs(b["lambda_exist"].get<double>() - 0.055452) < 1e-6);
  CHECK(fs::exists(fs::path(c.output_dir) / "percolation_mc.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "manifest.json"));
}

TEST_CASE("cascade outputs are reproducible across worker counts") {
  json doc = {{"experiment", "cascade"}, {"trials", 40}, {"window", {600, 600}}, {"seed", 9}};
  auto a = parse_config(doc);
  a.output_dir = scratch("det_a").string();
  a.workers = 1;
  auto b = a;
  b.output_dir = scratch("det_b").string();
  b.workers = 3;
  const auto ma = run_experiment(a);
  const auto mb = run_experiment(b);
  CHECK(checksums(ma) == checksums(mb));
  for (const char* f : {"cascade_trials.csv", "round_counts.csv", "fits.json"}) {
    CHECK(checksums(ma).count(f) == 1);
  }

  auto other = a;
  other.seed = 10;
  other.output_dir = scratch("det_c").string();
  CHECK(checksums(run_experiment(other)) != checksums(ma));
}

TEST_CASE("aborted runs leave a partial manifest") {
  auto c = parse_config({{"experiment", "cascade"},
                         {"trials", 3},
                         {"baseline", "feasible"},
                         {"lambda", 5e-3},
                         {"window", {300, 300}},
                         {"resample_budget", 2}});
  c.output_dir = scratch("abort").string();
  CHECK_THROWS_AS(run_experiment(c), InfeasibleError);
  std::ifstream in(fs::path(c.output_dir) / "manifest.json");
  REQUIRE(in);
  const auto m = json::parse(in);
  CHECK(m["status"] == "aborted");
  CHECK(m["error"].get<std::string>().find("budget") != std::string::npos);
}

TEST_CASE("unwritable output directory") {
  auto c = parse_config({{"experiment", "array"}});
  c.output_dir = "/proc/domino_cannot_write_here";
  CHECK_THROWS(run_experiment(c));
}
