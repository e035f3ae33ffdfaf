#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "domino/errors.hpp"
#include "domino/experiment.hpp"

using nlohmann::json;

namespace {

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domino::ConfigError("", "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw domino::ConfigError("", std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"domino: cascade simulation for power-controlled wireless networks"};
  app.set_version_flag("--version", std::string(domino::kVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::size_t> trials;

  for (const char* verb : {"array", "cascade", "percolation", "sweep"}) {
    auto* sub = app.add_subcommand(verb, std::string("run the ") + verb + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "top-level seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string verb = app.get_subcommands().front()->get_name();

  try {
    json doc = config_path.empty() ? json::object() : load_file(config_path);
    if (!doc.is_object()) throw domino::ConfigError("", "config must be a JSON object");
    if (doc.contains("experiment") && doc["experiment"] != verb) {
      throw domino::ConfigError("/experiment", "config says '" + doc["experiment"].dump() +
                                                   "' but verb is '" + verb + "'");
    }
    json flags = {{"experiment", verb}};
    if (seed) flags["seed"] = *seed;
    if (!out_dir.empty()) flags["output_dir"] = out_dir;
    if (trials) {
      flags[verb == "percolation" ? "lattice_trials" : "trials"] = *trials;
    }
    doc.merge_patch(flags);

    const auto config = domino::parse_config(doc);
    const auto manifest = domino::run_experiment(config);
    std::cout << "wrote " << manifest.files.size() + 1 << " files to " << config.output_dir << " ("
              << manifest.wall_time_s << " s)\n";
  } catch (const domino::ConfigError& e) {
    std::cerr << "config error " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
