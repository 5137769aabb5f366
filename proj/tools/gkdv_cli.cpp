// Command-line driver: one experiment per invocation, configured by a flat
// JSON file with optional flag overrides.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gkdv/errors.hpp"
#include "gkdv/experiment.hpp"

namespace {

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral, observability, control and stabilization experiments for the linearized coupled KdV system"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::string mode;
  int N = -1;
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("command", command, "spectrum|gaps|resonance|observe|ingham|control|stabilize|duality");
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--preset", preset, "parameter preset")->check(CLI::IsMember({"generic", "resonant"}));
  app.add_option("--mode", mode, "observe: both|u|v, control: both|f|g");
  app.add_option("-N", N, "truncation order");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random states");
  app.add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
      return 4;
    }
    if (!doc.is_object()) {
      std::cerr << "config error: top level of " << config_path << " must be an object\n";
      return 4;
    }
  }
  if (!command.empty()) doc["command"] = command;
  if (!preset.empty()) {
    for (const char* k : {"a", "c", "d", "r"}) doc.erase(k);
    doc["preset"] = preset;
  }
  if (!out_dir.empty()) doc["output_dir"] = out_dir;
  if (!mode.empty()) doc["mode"] = mode;
  if (N >= 0) doc["N"] = N;
  if (*seed_opt) doc["seed"] = seed;

  gkdv::ExperimentConfig cfg;
  try {
    cfg = gkdv::ExperimentConfig::from_json(doc);
  } catch (const gkdv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  }

  NullBuffer null_buf;
  std::ostream null_stream(&null_buf);
  return gkdv::run(cfg, quiet ? null_stream : std::cout, std::cerr);
}
