#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/dynamics_oracle.hpp"
#include "ionpulse/errors.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/noise_sweep.hpp"
#include "ionpulse/optimizer.hpp"
#include "ionpulse/run_config.hpp"
#include "ionpulse/serialization.hpp"

namespace ionpulse::cli {

namespace {

struct Range {
  double lo = 0.0, hi = 0.0;
  int points = 0;
};

// "A:B:n"
Range parse_range(const std::string& text, const std::string& flag) {
  std::istringstream in(text);
  Range r;
  char c1 = 0, c2 = 0;
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.points) || c1 != ':' || c2 != ':' ||
      !in.eof()) {
    throw ConfigError(flag + ": expected A:B:n, got '" + text + "'");
  }
  if (r.points < 2 || r.lo > r.hi) {
    throw ConfigError(flag + ": need A <= B and n >= 2");
  }
  return r;
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    atomic_write(path, content);
  }
}

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string variant;

  RunConfig load() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) c.optimizer.seed = *seed;
    if (threads) c.optimizer.threads = *threads;
    if (!variant.empty()) c.cost.variant = parse_cost_variant(variant);
    c.validate();
    return c;
  }
};

int cmd_modes(const Common& common, const std::string& format, std::ostream& out) {
  const RunConfig c = common.load();
  const ChainModel chain = build_chain(c.trap_config());
  if (format == "json") {
    emit(chain_json(chain), common.out_path, out);
    return kOk;
  }
  std::ostringstream t;
  t << std::fixed;
  t << "mode  freq_MHz";
  for (int j = 0; j < chain.ion_count(); ++j) t << "     b_" << j;
  for (int j = 0; j < chain.ion_count(); ++j) t << "   eta_" << j;
  t << '\n';
  for (int k = 0; k < chain.mode_count(); ++k) {
    t << std::setw(4) << k << std::setw(10) << std::setprecision(5)
      << to_hz(chain.mode_freqs(k)) / 1e6;
    for (int j = 0; j < chain.ion_count(); ++j) {
      t << std::setw(8) << std::setprecision(4) << chain.mode_matrix(j, k);
    }
    for (int j = 0; j < chain.ion_count(); ++j) {
      t << std::setw(8) << std::setprecision(4) << chain.lamb_dicke(j, k);
    }
    t << '\n';
  }
  for (const auto& w : chain.warnings) t << "warning: " << w << '\n';
  emit(t.str(), common.out_path, out);
  return kOk;
}

int cmd_optimize(const Common& common, std::string report_path, std::ostream& out,
                 std::ostream& err) {
  const RunConfig c = common.load();
  const ChainModel chain = build_chain(c.trap_config());
  for (const auto& w : chain.warnings) err << "warning: " << w << '\n';
  const PulseLayout layout = c.layout();
  const OptimizeResult result =
      optimize(layout, chain, c.drive_config(), c.cost_spec(), c.optimizer_config());
  const PulseSchedule schedule = build_schedule(result.best, layout);

  const std::string pulse_path = common.out_path.empty() ? "pulse.json" : common.out_path;
  if (report_path.empty()) {
    report_path = pulse_path == "-" ? "" : pulse_path + ".report.json";
  }
  emit(pulse_to_json(schedule), pulse_path, out);
  if (!report_path.empty()) {
    atomic_write(report_path,
                 run_report_json(result, c.optimizer.seed, c.cost.variant));
  }
  err << "cost " << result.cost.total << " (beta " << result.cost.groups.beta
      << ", beta~ " << result.cost.groups.beta_tilde << ", theta "
      << result.cost.groups.theta << ", theta~ " << result.cost.groups.theta_tilde
      << "), restart " << result.best_restart << '\n';
  if (!result.converged) {
    err << "optimizer did not reach cost tolerance " << c.optimizer.cost_tolerance
        << "; best-effort pulse written\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_sweep(const Common& common, const std::string& pulse_path,
              const std::string& spec_path, const std::string& drift_khz,
              const std::string& time_scale, const std::string& format,
              std::ostream& out) {
  const RunConfig c = common.load();
  const ChainModel chain = build_chain(c.trap_config());
  const PulseSchedule schedule = load_pulse(pulse_path, c.omega_max());
  SweepSpec spec = c.sweep_spec();
  if (!spec_path.empty()) {
    try {
      spec = parse_sweep_spec(read_file(spec_path), spec);
    } catch (const ConfigError& e) {
      throw ConfigError(spec_path + ":" + e.what());
    }
  }
  if (!drift_khz.empty()) {
    const Range r = parse_range(drift_khz, "--drift-khz");
    spec.drift_min_hz = r.lo * 1e3;
    spec.drift_max_hz = r.hi * 1e3;
    spec.drift_points = r.points;
  }
  if (!time_scale.empty()) {
    const Range r = parse_range(time_scale, "--time-scale");
    spec.scale_min = r.lo;
    spec.scale_max = r.hi;
    spec.scale_points = r.points;
  }
  if (!drift_khz.empty() && !time_scale.empty()) {
    spec.mode = SweepMode::kCombined2D;
  } else if (!drift_khz.empty()) {
    spec.mode = SweepMode::kDrift1D;
  } else if (!time_scale.empty()) {
    spec.mode = SweepMode::kTime1D;
  }
  const ThermalEnv env = make_thermal_env(chain.mode_freqs, c.env.temperature_k);
  const SweepGrid grid =
      sweep(schedule, chain, c.drive_config(), env, spec, c.optimizer.threads);
  emit(format == "json" ? sweep_json(grid) : sweep_csv(grid), common.out_path, out);
  return kOk;
}

int cmd_evaluate(const Common& common, const std::string& pulse_path, double delta_hz,
                 double scale, std::ostream& out) {
  const RunConfig c = common.load();
  const ChainModel chain = build_chain(c.trap_config());
  PulseSchedule schedule = load_pulse(pulse_path, c.omega_max());
  if (!(scale > 0.0)) throw ConfigError("--scale must be positive");
  if (scale != 1.0) schedule = schedule.stretched(scale);
  DriveConfig drive = c.drive_config();
  drive.drift = to_angular(delta_hz);
  const CouplingReport rep = evaluate_couplings(schedule, chain, drive);
  const ThermalEnv env = make_thermal_env(chain.mode_freqs, c.env.temperature_k);
  emit(coupling_report_json(rep, ms_fidelity(rep, env)), common.out_path, out);
  return kOk;
}

int cmd_verify(const Common& common, const std::string& pulse_path,
               const std::string& oracle_path, std::ostream& out) {
  const RunConfig c = common.load();
  const ChainModel chain = build_chain(c.trap_config());
  const PulseSchedule schedule = load_pulse(pulse_path, c.omega_max());
  OracleConfig oc;
  if (!oracle_path.empty()) {
    try {
      oc = parse_oracle_config(read_file(oracle_path));
    } catch (const ConfigError& e) {
      throw ConfigError(oracle_path + ":" + e.what());
    }
  }
  const DriveConfig drive = c.drive_config();
  const ThermalEnv env = make_thermal_env(chain.mode_freqs, c.env.temperature_k);

  // The analytic side only sees the modes the oracle propagates.
  ChainModel sub = chain;
  std::vector<int> modes = oc.modes;
  if (modes.empty()) {
    for (int k = 0; k < chain.mode_count(); ++k) modes.push_back(k);
  }
  sub.mode_freqs.resize(static_cast<Eigen::Index>(modes.size()));
  sub.mode_matrix.resize(chain.ion_count(), static_cast<Eigen::Index>(modes.size()));
  sub.lamb_dicke.resize(chain.ion_count(), static_cast<Eigen::Index>(modes.size()));
  ThermalEnv sub_env{env.temperature, Eigen::VectorXd(static_cast<Eigen::Index>(modes.size()))};
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const int k = modes[m];
    if (k < 0 || k >= chain.mode_count()) throw ConfigError("oracle mode index out of range");
    const auto e = static_cast<Eigen::Index>(m);
    sub.mode_freqs(e) = chain.mode_freqs(k);
    sub.mode_matrix.col(e) = chain.mode_matrix.col(k);
    sub.lamb_dicke.col(e) = chain.lamb_dicke.col(k);
    sub_env.occupations(e) = env.occupations(k);
  }
  const FidelityResult analytic =
      ms_fidelity(evaluate_couplings(schedule, sub, drive), sub_env);

  const PropagatedGate gate = propagate(schedule, chain, drive, oc);
  const OracleFidelity exact = gate_fidelity_exact(gate, env, oc);

  std::ostringstream t;
  t << std::setprecision(12);
  t << "fidelity_formula      " << analytic.fidelity << '\n';
  t << "fidelity_trace        " << exact.fidelity << "   |Tr(Ug^dag U)/4|^2\n";
  t << "overlap_trace         " << exact.overlap << "   |Tr(Ug^dag U)/4|\n";
  t << "gap_squared           " << std::abs(exact.fidelity - analytic.fidelity) << '\n';
  t << "gap_unsquared         " << std::abs(exact.overlap - analytic.fidelity) << '\n';
  t << "unitarity_defect      " << gate.unitarity_defect(oc.assemble_cap) << '\n';
  t << "fock_leakage          " << gate.leakage << '\n';
  t << "thermal_weight        " << exact.thermal_weight << '\n';
  t << "hilbert_dimension     " << gate.dimension() << '\n';
  emit(t.str(), common.out_path, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust Molmer-Sorensen pulse design for trapped-ion chains", "ionpulse"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_path, "run configuration (JSON)");
    sub->add_option("-o,--out", common.out_path, "output file ('-' for stdout)");
    sub->add_option("--threads", common.threads, "cap on worker threads (0 = all cores)");
  };

  std::string format = "table";
  auto* modes = app.add_subcommand("modes", "print transverse modes and Lamb-Dicke factors");
  add_common(modes);
  modes->add_option("--format", format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  std::string report_path;
  auto* opt = app.add_subcommand("optimize", "design a robust pulse");
  add_common(opt);
  opt->add_option("--seed", common.seed, "64-bit seed");
  opt->add_option("--variant", common.variant, "cost variant")
      ->check(CLI::IsMember({"normal", "beta", "full"}));
  opt->add_option("--report", report_path, "run report path (default: <out>.report.json)");

  std::string pulse_path, spec_path, drift_khz, time_scale, sweep_format = "csv";
  auto* sw = app.add_subcommand("sweep", "evaluate a pulse over drift / time-noise grids");
  add_common(sw);
  sw->add_option("--pulse", pulse_path, "pulse JSON")->required();
  sw->add_option("--spec", spec_path, "sweep spec JSON");
  sw->add_option("--drift-khz", drift_khz, "drift grid A:B:n in kHz");
  sw->add_option("--time-scale", time_scale, "time-scale grid A:B:n");
  sw->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  double delta_hz = 0.0, scale = 1.0;
  auto* ev = app.add_subcommand("evaluate", "couplings and fidelity of one pulse");
  add_common(ev);
  ev->add_option("--pulse", pulse_path, "pulse JSON")->required();
  ev->add_option("--delta-hz", delta_hz, "sideband drift in Hz");
  ev->add_option("--scale", scale, "gate-time scale factor");

  std::string oracle_path;
  auto* ver = app.add_subcommand("verify", "compare the fidelity formula with Fock-space propagation");
  add_common(ver);
  ver->add_option("--pulse", pulse_path, "pulse JSON")->required();
  ver->add_option("--oracle", oracle_path, "oracle settings JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*modes) return cmd_modes(common, format, out);
    if (*opt) return cmd_optimize(common, report_path, out, err);
    if (*sw) return cmd_sweep(common, pulse_path, spec_path, drift_khz, time_scale,
                              sweep_format, out);
    if (*ev) return cmd_evaluate(common, pulse_path, delta_hz, scale, out);
    if (*ver) return cmd_verify(common, pulse_path, oracle_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace ionpulse::cli
