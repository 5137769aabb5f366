#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkdv/params.hpp"

namespace gkdv {

enum class Command { spectrum, gaps, resonance, observe, ingham, control, stabilize, duality };

const char* to_string(Command c) noexcept;
Command parse_command(const std::string& name);

/// How to build an initial or target state: "zero", "random",
/// "random_zero_mean", "free" (target only: the uncontrolled arrival state),
/// "matched_mean" (target only: random, with the k=0 part of the initial
/// state), or an explicit list of modal coefficients.
struct StateSpec {
  std::string kind = "random";
  std::vector<std::complex<double>> coeffs;
};

/// Flat JSON configuration; keys mirror the field names.
struct ExperimentConfig {
  Command command = Command::spectrum;
  PhysicalParams params = PhysicalParams::generic();
  std::string preset = "generic";  // "custom" when a, c, d, r were given
  int N = 6;
  double x0 = 0.0;

  // observe
  std::vector<int> N_values;
  std::vector<double> window_lengths;
  std::vector<double> window_factors;  // multiples of the critical time
  double window_t0 = 0.0;
  std::string mode = "both";

  // ingham
  std::vector<double> frequencies;
  std::optional<std::pair<int, int>> int_range;
  double window_length = 1.0;

  // control, duality
  double T = 1.0;
  StateSpec initial;
  StateSpec target;
  int draws = 20;

  // stabilize
  double omega_target = 0.5;
  double Th = 2.0;
  double T_sim = 20.0;
  bool zero_feedback = false;

  double resonance_tol = 1e-9;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  /// Throws ConfigError on unknown keys, wrong types or invalid values.
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

/// Runs one experiment and writes its artifacts into config.output_dir.
/// Returns 0 on success, 2 on a violated mean constraint, 3 on ill-conditioning,
/// 4 on configuration errors and 1 on any other numerical failure.
int run(const ExperimentConfig& config, std::ostream& log, std::ostream& err);

}  // namespace gkdv
