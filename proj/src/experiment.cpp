#include "gkdv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/hum.hpp"
#include "gkdv/io.hpp"
#include "gkdv/modal.hpp"
#include "gkdv/observability.hpp"
#include "gkdv/spectrum.hpp"
#include "gkdv/stabilization.hpp"

namespace gkdv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr Command kCommands[] = {Command::spectrum, Command::gaps,    Command::resonance, Command::observe,
                                 Command::ingham,   Command::control, Command::stabilize, Command::duality};

const std::set<std::string> kKnownKeys = {
    "command",   "preset",        "a",       "c",           "d",         "r",         "N",
    "x0",        "N_values",      "window_lengths", "window_factors", "window_t0", "mode",
    "frequencies", "int_range",   "window_length", "T",      "initial",   "target",    "draws",
    "omega_target", "Th",         "T_sim",   "zero_feedback", "resonance_tol", "output_dir", "seed"};

template <class T>
T get(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

StateSpec parse_state(const json& doc, const char* key) {
  StateSpec spec;
  if (!doc.contains(key)) return spec;
  const json& v = doc.at(key);
  if (v.is_string()) {
    spec.kind = v.get<std::string>();
    static const std::set<std::string> kinds = {"zero", "random", "random_zero_mean", "free", "matched_mean"};
    if (!kinds.count(spec.kind)) throw ConfigError(std::string("unknown state kind '") + spec.kind + "'");
    return spec;
  }
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a string or a list of [re, im]");
  spec.kind = "explicit";
  for (const json& c : v) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ConfigError(std::string("'") + key + "' entries must be [re, im] pairs");
    }
    spec.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
  }
  return spec;
}

TraceMode trace_mode(const std::string& m) {
  if (m == "both") return TraceMode::both;
  if (m == "u" || m == "u_only") return TraceMode::u_only;
  if (m == "v" || m == "v_only") return TraceMode::v_only;
  throw ConfigError("observe mode must be both, u or v");
}

ControlMode control_mode(const std::string& m) {
  if (m == "both") return ControlMode::both;
  if (m == "f" || m == "f_only") return ControlMode::f_only;
  if (m == "g" || m == "g_only") return ControlMode::g_only;
  throw ConfigError("control mode must be both, f or g");
}

ModalState zero_mean(const Spectrum& s, ModalState st) {
  st.at(0, Branch::plus) = 0.0;
  st.at(0, Branch::minus) = 0.0;
  return (1.0 / std::sqrt(energy(s, st))) * st;
}

ModalState build_state(const StateSpec& spec, const Spectrum& s, std::uint64_t seed, const ModalState* initial,
                       double T) {
  if (spec.kind == "zero") return ModalState(s.N());
  if (spec.kind == "random") return random_state(s, seed);
  if (spec.kind == "random_zero_mean") return zero_mean(s, random_state(s, seed));
  if (spec.kind == "free" || spec.kind == "matched_mean") {
    if (!initial) throw ConfigError("'" + spec.kind + "' is only valid for the target state");
    if (spec.kind == "free") return evolve(s, *initial, T);
    ModalState st = random_state(s, seed);
    st.at(0, Branch::plus) = initial->at(0, Branch::plus);
    st.at(0, Branch::minus) = initial->at(0, Branch::minus);
    return st;
  }
  const auto n = static_cast<Eigen::Index>(s.size());
  if (static_cast<Eigen::Index>(spec.coeffs.size()) != n) {
    std::ostringstream msg;
    msg << "explicit state needs " << n << " coefficients, got " << spec.coeffs.size();
    throw ConfigError(msg.str());
  }
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = spec.coeffs[static_cast<std::size_t>(i)];
  return ModalState(s.N(), c);
}

json coeffs_json(const Eigen::VectorXcd& c) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < c.size(); ++i) arr.push_back({c(i).real(), c(i).imag()});
  return arr;
}

json terms_json(const ExponentialSignal& sig) {
  json arr = json::array();
  for (const ExpTerm& t : sig.terms()) {
    arr.push_back({{"amp_re", t.amplitude.real()}, {"amp_im", t.amplitude.imag()}, {"freq", t.frequency},
                   {"degree", t.degree}});
  }
  return arr;
}

json params_json(const PhysicalParams& p) {
  return {{"a", p.a()}, {"c", p.c()}, {"d", p.d()}, {"r", p.r()}};
}

ExponentialSignal random_signal(UniformSource& rng) {
  ExponentialSignal sig;
  for (int j = 0; j < 3; ++j) {
    const std::complex<double> amp(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const double freq = rng.uniform(-20.0, 20.0);
    const int degree = rng.next() < 0.3 ? 1 : 0;
    sig.add({amp, freq, degree});
  }
  return sig;
}

void run_spectrum(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const Spectrum s(cfg.params, cfg.N);
  io::CsvWriter csv(dir / "spectrum.csv", {"k", "branch", "omega", "z1_re", "z1_im", "z2_re", "z2_im"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ModeBranch lab = s.label(i);
    const auto& z = s.z(i);
    csv.cell(lab.k).cell(std::string(to_string(lab.branch))).cell(s.omega(i));
    csv.cell(z(0).real()).cell(z(0).imag()).cell(z(1).real()).cell(z(1).imag());
    csv.end_row();
  }
  log << "spectrum.csv: " << s.size() << " rows\n";
}

void run_gaps(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const GapReport g = gap_report(cfg.params, cfg.N);
  io::CsvWriter csv(dir / "gaps.csv", {"k", "plus_gap", "minus_gap"});
  for (std::size_t j = 0; j < g.plus_gaps.size(); ++j) {
    csv.cell(static_cast<int>(j) - g.N).cell(g.plus_gaps[j]).cell(g.minus_gaps[j]);
    csv.end_row();
  }
  io::write_json(dir / "gaps_summary.json", {{"N", g.N},
                                             {"A_const", g.A_const},
                                             {"B_or_slope", g.B_or_slope},
                                             {"gamma_inf_estimate", g.gamma_inf_estimate},
                                             {"D_plus_estimate", g.D_plus_estimate},
                                             {"T0", g.T0}});
  log << "gaps.csv, gaps_summary.json: D+ estimate " << g.D_plus_estimate << "\n";
}

void run_resonance(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const ResonanceResult res = resonance_check(cfg.params, cfg.N, cfg.resonance_tol);
  io::CsvWriter csv(dir / "resonance.csv", {"k1", "branch1", "k2", "branch2", "distance"});
  for (const ResonancePair& p : res.pairs) {
    csv.cell(p.first.k).cell(std::string(to_string(p.first.branch)));
    csv.cell(p.second.k).cell(std::string(to_string(p.second.branch))).cell(p.distance);
    csv.end_row();
  }
  log << "resonance.csv: " << res.pairs.size() << " coincidences"
      << (res.k0_degenerate ? " (plus the structural k=0 pair)" : "") << "\n";
}

void run_observe(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const TraceMode mode = trace_mode(cfg.mode);
  std::vector<double> lengths = cfg.window_lengths;
  if (!cfg.window_factors.empty()) {
    const double T0 = critical_time(cfg.params);
    if (T0 <= 0.0) throw ConfigError("window_factors need a positive critical time (resonant parameters)");
    for (double f : cfg.window_factors) lengths.push_back(f * T0);
  }
  if (lengths.empty()) lengths.push_back(cfg.window_length);
  const std::vector<int> Ns = cfg.N_values.empty() ? std::vector<int>{cfg.N} : cfg.N_values;

  io::CsvWriter csv(dir / "observability.csv", {"N", "window_length", "mode", "alpha", "beta", "kernel_dim"});
  for (int N : Ns) {
    const Spectrum s(cfg.params, N);
    for (double L : lengths) {
      const ObservationWindow w(cfg.window_t0, cfg.window_t0 + L);
      const ObservabilityReport rep = observability_constants(s, cfg.x0, w, mode);
      csv.cell(N).cell(L).cell(std::string(to_string(mode))).cell(rep.alpha).cell(rep.beta).cell(rep.kernel_dim);
      csv.end_row();
    }
  }
  log << "observability.csv: " << Ns.size() * lengths.size() << " rows\n";
}

void run_ingham(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  std::vector<double> freqs = cfg.frequencies;
  if (cfg.int_range) {
    for (int k = cfg.int_range->first; k <= cfg.int_range->second; ++k) freqs.push_back(k);
  }
  if (freqs.empty()) throw ConfigError("ingham needs 'frequencies' or 'int_range'");
  const std::vector<double> lengths = cfg.window_lengths.empty() ? std::vector<double>{cfg.window_length}
                                                                 : cfg.window_lengths;
  io::CsvWriter csv(dir / "ingham.csv", {"n_frequencies", "window_length", "direct_const", "inverse_const"});
  for (double L : lengths) {
    const InghamReport rep = ingham_report(freqs, ObservationWindow::of_length(L));
    csv.cell(static_cast<int>(freqs.size())).cell(L).cell(rep.direct_const).cell(rep.inverse_const);
    csv.end_row();
  }
  log << "ingham.csv: " << lengths.size() << " rows\n";
}

void run_control(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const Spectrum s(cfg.params, cfg.N);
  const ControlMode mode = control_mode(cfg.mode);
  const ModalState initial = build_state(cfg.initial, s, cfg.seed, nullptr, cfg.T);
  const ModalState target = build_state(cfg.target, s, cfg.seed + 1, &initial, cfg.T);

  const ControlPlan plan = solve_control(s, cfg.x0, cfg.T, initial, target, mode);
  const double err = verify_roundtrip(s, plan, initial, target);

  json doc = {{"params", params_json(cfg.params)},
              {"N", cfg.N},
              {"x0", cfg.x0},
              {"T", cfg.T},
              {"mode", to_string(mode)},
              {"coercivity", plan.coercivity},
              {"condition", plan.condition},
              {"roundtrip_error", err},
              {"adjoint_seed", coeffs_json(plan.adjoint_seed.coeffs())},
              {"f", nullptr},
              {"g", nullptr}};
  if (plan.f) {
    io::write_signal_csv(dir / "control_f.csv", *plan.f);
    doc["f"] = {{"file", "control_f.csv"}, {"terms", terms_json(*plan.f)}};
  }
  if (plan.g) {
    io::write_signal_csv(dir / "control_g.csv", *plan.g);
    doc["g"] = {{"file", "control_g.csv"}, {"terms", terms_json(*plan.g)}};
  }
  io::write_json(dir / "plan.json", doc);

  io::CsvWriter csv(dir / "verify.csv", {"metric", "value"});
  csv.cell(std::string("roundtrip_error")).cell(err);
  csv.end_row();
  csv.cell(std::string("condition")).cell(plan.condition);
  csv.end_row();
  csv.cell(std::string("coercivity")).cell(plan.coercivity);
  csv.end_row();
  csv.cell(std::string("u_mean_drift")).cell(std::abs(u_mean(s, initial) - u_mean(s, target)));
  csv.end_row();
  csv.cell(std::string("v_mean_drift")).cell(std::abs(v_mean(s, initial) - v_mean(s, target)));
  csv.end_row();
  log << "plan.json, verify.csv: round-trip error " << err << "\n";
}

void run_stabilize(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const Spectrum s(cfg.params, cfg.N);
  const FeedbackGains gains =
      cfg.zero_feedback ? zero_gains(s, cfg.x0) : feedback_gains(s, cfg.x0, cfg.omega_target, cfg.Th);
  const double abscissa = spectral_abscissa(closed_loop_generator(s, gains));
  const ModalState state0 = build_state(cfg.initial, s, cfg.seed, nullptr, 0.0);
  const DecayReport rep = closed_loop_simulate(s, gains, state0, cfg.T_sim);

  io::CsvWriter decay(dir / "decay.csv", {"t", "energy", "log_energy"});
  for (std::size_t j = 0; j < rep.times.size(); ++j) {
    decay.cell(rep.times[j]).cell(rep.energies[j]).cell(std::log(rep.energies[j]));
    decay.end_row();
  }
  io::CsvWriter gcsv(dir / "gains.csv", {"k", "branch", "F_re", "F_im", "G_re", "G_im"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ModeBranch lab = s.label(i);
    const auto ii = static_cast<Eigen::Index>(i);
    gcsv.cell(lab.k).cell(std::string(to_string(lab.branch)));
    gcsv.cell(gains.F_row(ii).real()).cell(gains.F_row(ii).imag());
    gcsv.cell(gains.G_row(ii).real()).cell(gains.G_row(ii).imag());
    gcsv.end_row();
  }
  io::write_json(dir / "stabilize.json", {{"omega_target", gains.omega_target},
                                          {"fitted_rate", rep.fitted_rate},
                                          {"fitted_M", rep.fitted_M},
                                          {"abscissa", abscissa},
                                          {"horizon_Th", gains.horizon_Th},
                                          {"T_sim", cfg.T_sim},
                                          {"N", cfg.N},
                                          {"zero_feedback", cfg.zero_feedback}});
  log << "decay.csv, gains.csv, stabilize.json: abscissa " << abscissa << ", fitted rate " << rep.fitted_rate
      << "\n";
}

void run_duality(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const Spectrum s(cfg.params, cfg.N);
  io::CsvWriter csv(dir / "duality.csv", {"draw", "T", "residual"});
  double worst = 0.0;
  for (int j = 0; j < cfg.draws; ++j) {
    UniformSource rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(j));
    const ExponentialSignal f = random_signal(rng);
    const ExponentialSignal g = random_signal(rng);
    const ModalState u0 = random_state(s, cfg.seed + 7919ULL * static_cast<std::uint64_t>(j + 1), false);
    const AdjointState phi0 = random_adjoint_state(s, cfg.seed + 104729ULL * static_cast<std::uint64_t>(j + 1), false);
    const double res = duality_residual(s, f, g, cfg.x0, u0, phi0, cfg.T);
    worst = std::max(worst, res);
    csv.cell(j).cell(cfg.T).cell(res);
    csv.end_row();
  }
  log << "duality.csv: worst residual " << worst << "\n";
}

}  // namespace

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::gaps: return "gaps";
    case Command::resonance: return "resonance";
    case Command::observe: return "observe";
    case Command::ingham: return "ingham";
    case Command::control: return "control";
    case Command::stabilize: return "stabilize";
    case Command::duality: return "duality";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : kCommands) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  if (!doc.contains("command")) throw ConfigError("config needs a 'command'");
  cfg.command = parse_command(get<std::string>(doc, "command", ""));

  cfg.preset = get<std::string>(doc, "preset", "generic");
  const int explicit_params = static_cast<int>(doc.contains("a")) + doc.contains("c") + doc.contains("d") +
                              doc.contains("r");
  try {
    if (explicit_params == 4) {
      if (doc.contains("preset")) throw ConfigError("give either 'preset' or a, c, d, r, not both");
      cfg.params = PhysicalParams(get<double>(doc, "a", 0), get<double>(doc, "c", 0), get<double>(doc, "d", 0),
                                  get<double>(doc, "r", 0));
      cfg.preset = "custom";
    } else if (explicit_params != 0) {
      throw ConfigError("a, c, d and r must be given together");
    } else if (cfg.preset == "generic") {
      cfg.params = PhysicalParams::generic();
    } else if (cfg.preset == "resonant") {
      cfg.params = PhysicalParams::resonant_preset();
    } else {
      throw ConfigError("preset must be generic or resonant");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  cfg.N = get<int>(doc, "N", cfg.N);
  if (cfg.N < 0) throw ConfigError("N must be non-negative");
  cfg.x0 = get<double>(doc, "x0", cfg.x0);
  cfg.N_values = get<std::vector<int>>(doc, "N_values", {});
  for (int n : cfg.N_values) {
    if (n < 0) throw ConfigError("N_values must be non-negative");
  }
  cfg.window_lengths = get<std::vector<double>>(doc, "window_lengths", {});
  cfg.window_factors = get<std::vector<double>>(doc, "window_factors", {});
  cfg.window_t0 = get<double>(doc, "window_t0", cfg.window_t0);
  cfg.window_length = get<double>(doc, "window_length", cfg.window_length);
  for (double L : cfg.window_lengths) {
    if (!(L > 0.0)) throw ConfigError("window lengths must be positive");
  }
  for (double f : cfg.window_factors) {
    if (!(f > 0.0)) throw ConfigError("window factors must be positive");
  }
  if (!(cfg.window_length > 0.0)) throw ConfigError("window_length must be positive");
  cfg.mode = get<std::string>(doc, "mode", cfg.mode);
  if (cfg.command == Command::observe) trace_mode(cfg.mode);
  if (cfg.command == Command::control) control_mode(cfg.mode);

  cfg.frequencies = get<std::vector<double>>(doc, "frequencies", {});
  if (doc.contains("int_range")) {
    const auto r = get<std::vector<int>>(doc, "int_range", {});
    if (r.size() != 2 || r[0] > r[1]) throw ConfigError("int_range must be [lo, hi] with lo <= hi");
    cfg.int_range = std::make_pair(r[0], r[1]);
  }

  cfg.T = get<double>(doc, "T", cfg.T);
  if (!std::isfinite(cfg.T)) throw ConfigError("T must be finite");
  cfg.initial = parse_state(doc, "initial");
  cfg.target = parse_state(doc, "target");
  cfg.draws = get<int>(doc, "draws", cfg.draws);
  if (cfg.draws < 1) throw ConfigError("draws must be positive");

  cfg.omega_target = get<double>(doc, "omega_target", cfg.omega_target);
  cfg.Th = get<double>(doc, "Th", cfg.Th);
  cfg.T_sim = get<double>(doc, "T_sim", cfg.T_sim);
  cfg.zero_feedback = get<bool>(doc, "zero_feedback", cfg.zero_feedback);
  if (!(cfg.T_sim > 0.0)) throw ConfigError("T_sim must be positive");

  cfg.resonance_tol = get<double>(doc, "resonance_tol", cfg.resonance_tol);
  if (!(cfg.resonance_tol > 0.0)) throw ConfigError("resonance_tol must be positive");
  cfg.output_dir = get<std::string>(doc, "output_dir", cfg.output_dir.string());
  cfg.seed = get<std::uint64_t>(doc, "seed", cfg.seed);
  return cfg;
}

int run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  if (cfg.params.resonant()) {
    err << "warning: resonant parameters (a*d = 1); critical time T0 = "
        << io::format_number(critical_time(cfg.params)) << "\n";
  }
  try {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
      throw ConfigError("cannot create output directory " + cfg.output_dir.string());
    }
    switch (cfg.command) {
      case Command::spectrum: run_spectrum(cfg, cfg.output_dir, log); break;
      case Command::gaps: run_gaps(cfg, cfg.output_dir, log); break;
      case Command::resonance: run_resonance(cfg, cfg.output_dir, log); break;
      case Command::observe: run_observe(cfg, cfg.output_dir, log); break;
      case Command::ingham: run_ingham(cfg, cfg.output_dir, log); break;
      case Command::control: run_control(cfg, cfg.output_dir, log); break;
      case Command::stabilize: run_stabilize(cfg, cfg.output_dir, log); break;
      case Command::duality: run_duality(cfg, cfg.output_dir, log); break;
    }
  } catch (const ConstraintViolation& e) {
    err << "constraint violation: " << e.what() << "\n";
    return 2;
  } catch (const IllConditioned& e) {
    err << "ill-conditioned: " << e.what() << "\n";
    return 3;
  } catch (const GramianSingular& e) {
    err << "singular Gramian: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gkdv
