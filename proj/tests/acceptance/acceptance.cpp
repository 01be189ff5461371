// Acceptance run: one PASS/FAIL line per criterion, then informational lines.
// Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/coupling_quadrature.hpp"
#include "ionpulse/dynamics_oracle.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/noise_sweep.hpp"
#include "ionpulse/optimizer.hpp"
#include "ionpulse/run_config.hpp"
#include "ionpulse/serialization.hpp"
#include "support.hpp"

using namespace ionpulse;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Setup {
  RunConfig config;
  ChainModel chain;
  DriveConfig drive;
  ThermalEnv env;

  explicit Setup(const std::string& path)
      : config(load_run_config(path)),
        chain(build_chain(config.trap_config())),
        drive(config.drive_config()),
        env(make_thermal_env(chain.mode_freqs, config.env.temperature_k)) {}

  PulseSchedule optimize_variant(CostVariant v, OptimizeResult* out = nullptr) const {
    CostSpec spec = config.cost_spec();
    spec.variant = v;
    const OptimizeResult r =
        optimize(config.layout(), chain, drive, spec, config.optimizer_config());
    if (out) *out = r;
    return build_schedule(r.best, config.layout());
  }

  double max_infidelity(const PulseSchedule& p, const SweepSpec& s) const {
    return sweep(p, chain, drive, env, s).max_infidelity();
  }
};

SweepSpec drift_spec(double khz, int points) {
  SweepSpec s;
  s.mode = SweepMode::kDrift1D;
  s.drift_min_hz = -khz * 1e3;
  s.drift_max_hz = khz * 1e3;
  s.drift_points = points;
  return s;
}

SweepSpec time_spec() {
  SweepSpec s;
  s.mode = SweepMode::kTime1D;
  s.scale_points = 201;
  return s;
}

SweepSpec combined_spec(double khz) {
  SweepSpec s = drift_spec(khz, 51);
  s.mode = SweepMode::kCombined2D;
  s.scale_points = 51;
  return s;
}

// Criteria 1-4 on one configuration. `hz` converts the nominal kHz ranges
// into the configuration's frequency unit.
struct Robustness {
  double drift = 0, time = 0, combined = 0, normal_drift = 0, zero = 0;
  double opt_seconds = 0, sweep_seconds = 0;
  bool converged = false, normal_converged = false;
};

Robustness robustness(const Setup& s, double unit) {
  Robustness r;
  auto t0 = std::chrono::steady_clock::now();
  OptimizeResult res;
  const PulseSchedule robust = s.optimize_variant(CostVariant::kFullyRobust, &res);
  r.opt_seconds = seconds_since(t0);
  r.converged = res.converged;
  t0 = std::chrono::steady_clock::now();
  r.drift = s.max_infidelity(robust, drift_spec(10.0 * unit, 201));
  r.sweep_seconds = seconds_since(t0);
  r.time = s.max_infidelity(robust, time_spec());
  r.combined = s.max_infidelity(robust, combined_spec(5.0 * unit));
  r.zero = sweep_point(robust, s.chain, s.drive, s.env, 0.0, 1.0).infidelity;

  OptimizeResult nres;
  const PulseSchedule normal = s.optimize_variant(CostVariant::kNormal, &nres);
  r.normal_converged = nres.converged;
  r.normal_drift = s.max_infidelity(normal, drift_spec(10.0 * unit, 201));
  return r;
}

void closed_forms() {
  testing::Rng rng(505);
  double worst_beta = 0.0, worst_theta = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    TrapConfig t;
    t.ion_count = 2 + trial % 3;
    const ChainModel chain = build_chain(t);
    const DriveConfig drive{to_angular(3.15e6), 0.0};
    const int a = rng.integer(0, t.ion_count - 2);
    const int b = rng.integer(a + 1, t.ion_count - 1);
    const PulseSchedule p = testing::random_schedule(rng, rng.integer(1, 20), 100e-6,
                                                     to_angular(rng.uniform(0.05e6, 2e6)),
                                                     {a, b}, rng.uniform() < 0.5);
    const CouplingReport r = evaluate_couplings(p, chain, drive);
    worst_beta = std::max(worst_beta,
                          testing::rel_error(r.beta, beta_quadrature(p, chain, drive)));
    worst_theta = std::max(
        worst_theta, testing::rel_error(r.theta_total, theta_quadrature(p, chain, drive).theta_total));
  }
  report(5, worst_beta < 1e-10 && worst_theta < 1e-8,
         fmt("worst beta rel err %.2e (< 1e-10), worst theta rel err %.2e (< 1e-8), 100 pulses",
             worst_beta, worst_theta));
}

void derivatives() {
  testing::Rng rng(606);
  const double h = to_angular(1.0);
  double worst = 0.0;
  auto entry_error = [&](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-12 / 1e-5);
  };
  for (int trial = 0; trial < 100; ++trial) {
    TrapConfig t;
    t.ion_count = 2 + trial % 3;
    const ChainModel chain = build_chain(t);
    const DriveConfig drive{to_angular(3.15e6), 0.0};
    const PulseSchedule p = testing::random_schedule(rng, rng.integer(1, 20), 100e-6,
                                                     to_angular(rng.uniform(0.05e6, 2e6)),
                                                     {0, t.ion_count - 1}, rng.uniform() < 0.5);
    const CouplingReport r = evaluate_couplings(p, chain, drive);
    DriveConfig up = drive, down = drive;
    up.drift += h;
    down.drift -= h;
    const Eigen::MatrixXcd fd =
        (beta_closed_form(p, chain, up) - beta_closed_form(p, chain, down)) / (2.0 * h);
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      worst = std::max(worst, entry_error(r.beta_tilde(i).real(), fd(i).real()));
      worst = std::max(worst, entry_error(r.beta_tilde(i).imag(), fd(i).imag()));
    }
    const double fd_theta = (theta(p, chain, up) - theta(p, chain, down)) / (2.0 * h);
    worst = std::max(worst, entry_error(r.theta_tilde_total, fd_theta));
  }
  report(6, worst < 1e-5,
         fmt("worst relative deviation %.2e (< 1e-5, floor 1e-12), 100 cases, step 2pi*1 Hz",
             worst));
}

void oracle() {
  testing::Rng rng(707);
  double worst_gap = 0.0, worst_gap_unsq = 0.0, worst_defect = 0.0, worst_cutoff = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int modes = 1 + trial % 2;
    std::vector<double> freqs;
    Eigen::MatrixXd eta(2, modes);
    for (int k = 0; k < modes; ++k) {
      freqs.push_back(3.0e6 + 0.2e6 * k);
      eta(0, k) = rng.uniform(0.02, 0.05);
      eta(1, k) = (k % 2 ? -1.0 : 1.0) * rng.uniform(0.02, 0.05);
    }
    const ChainModel chain = testing::synthetic_chain(freqs, eta);
    const DriveConfig drive{to_angular(3.0e6 + rng.uniform(40e3, 120e3)), 0.0};
    // A random start relaxed onto the gate manifold (closed loops, pi/4).
    // The amplitude cap keeps the phonon excursion well inside n_max = 10.
    const PulseLayout layout(10, 100e-6, to_angular(400e3), {0, 1});
    CostSpec spec;
    spec.variant = CostVariant::kNormal;
    OptimizerConfig cfg;
    cfg.restarts = 2;
    cfg.seed = 1000 + trial;
    const PulseSchedule p = build_schedule(optimize(layout, chain, drive, spec, cfg).best, layout);

    const ThermalEnv env = make_thermal_env(chain.mode_freqs, 1e-6);
    const double formula = ms_fidelity(evaluate_couplings(p, chain, drive), env).fidelity;
    OracleConfig oc;
    const PropagatedGate g10 = propagate(p, chain, drive, oc);
    const OracleFidelity f10 = gate_fidelity_exact(g10, env, oc);
    oc.fock_cutoff = 14;
    const OracleFidelity f14 = gate_fidelity_exact(propagate(p, chain, drive, oc), env, oc);

    worst_gap = std::max(worst_gap, std::abs(f10.fidelity - formula));
    worst_gap_unsq = std::max(worst_gap_unsq, std::abs(f10.overlap - formula));
    worst_defect = std::max(worst_defect, g10.unitarity_defect(oc.assemble_cap));
    worst_cutoff = std::max(worst_cutoff, std::abs(f14.fidelity - f10.fidelity));
  }
  report(7, worst_gap < 1e-3 && worst_defect < 1e-8 && worst_cutoff < 1e-5,
         fmt("|F_trace^2 - F_formula| <= %.2e (< 1e-3), unitarity defect <= %.2e (< 1e-8), "
             "cutoff 10->14 change <= %.2e (< 1e-5)",
             worst_gap, worst_defect, worst_cutoff));
  std::printf("  info: unsquared trace overlap gap <= %.2e\n", worst_gap_unsq);
}

void chain_model() {
  const ChainModel c = build_chain(TrapConfig{});
  const double expected[] = {2.5, 2.96, 3.29, 3.5};
  double worst = 0.0;
  int worst_mode = 0;
  std::string list;
  for (int k = 0; k < 4; ++k) {
    const double mhz = to_hz(c.mode_freqs(k)) / 1e6;
    const double dev = std::abs(mhz - expected[k]) / expected[k];
    if (dev > worst) {
      worst = dev;
      worst_mode = k;
    }
    list += fmt("%.4f ", mhz);
  }
  const double a2 = std::cbrt(0.25), a3 = std::cbrt(1.25);
  const Eigen::VectorXd u2 = solve_equilibrium_dimensionless(2);
  const Eigen::VectorXd u3 = solve_equilibrium_dimensionless(3);
  const double pos = std::max({std::abs(u2(1) - a2) / a2, std::abs(u2(0) + a2) / a2,
                               std::abs(u3(2) - a3) / a3, std::abs(u3(0) + a3) / a3,
                               std::abs(u3(1))});
  report(8, worst < 0.05 && pos < 1e-10,
         "modes [" + list + "] MHz vs {2.5, 2.96, 3.29, 3.5}: worst " +
             fmt("%.2f%% on mode %.0f (< 5%%); N=2,3 positions rel err %.1e (< 1e-10)",
                 100 * worst, worst_mode, pos));
}

void determinism(const Setup& s) {
  OptimizerConfig a = s.config.optimizer_config(), b = a;
  a.threads = 1;
  b.threads = 0;
  const CostSpec spec = s.config.cost_spec();
  const PulseLayout layout = s.config.layout();
  const PulseSchedule pa = build_schedule(optimize(layout, s.chain, s.drive, spec, a).best, layout);
  const PulseSchedule pb = build_schedule(optimize(layout, s.chain, s.drive, spec, b).best, layout);
  const bool pulse_same = pulse_to_json(pa) == pulse_to_json(pb);
  SweepSpec sw = combined_spec(5.0);
  const bool sweep_same = sweep_csv(sweep(pa, s.chain, s.drive, s.env, sw, 1)) ==
                          sweep_csv(sweep(pb, s.chain, s.drive, s.env, sw, 0));
  report(9, pulse_same && sweep_same,
         std::string("pulse JSON ") + (pulse_same ? "identical" : "differs") +
             ", sweep CSV " + (sweep_same ? "identical" : "differs") +
             " (1 thread vs all cores, same seed)");
}

}  // namespace

int main() {
  const Setup hz(IONPULSE_SOURCE_DIR "/configs/default.json");
  const Robustness r = robustness(hz, 1.0);

  report(1, r.drift < 1e-3,
         fmt("max infidelity over +-10 kHz drift = %.3e (< 1e-3); optimizer %.1f s, sweep %.2f s",
             r.drift, r.opt_seconds, r.sweep_seconds) +
             (r.converged ? "" : "; optimizer did not reach its cost tolerance"));
  report(2, r.time < 1e-3, fmt("max infidelity over s in [0.98, 1.02] = %.3e (< 1e-3)", r.time));
  const double ratio = r.normal_drift / r.drift;
  report(3, ratio >= 10.0,
         fmt("normal / fully_robust max infidelity = %.3e / %.3e = %.2f (>= 10)",
             r.normal_drift, r.drift, ratio));
  report(4, r.combined < 1e-3,
         fmt("max infidelity over +-5 kHz x +-0.02, 51x51 = %.3e (< 1e-3)", r.combined));
  closed_forms();
  derivatives();
  oracle();
  chain_model();
  determinism(hz);
  std::printf("  info: fully_robust infidelity at zero noise = %.2e\n", r.zero);

  // Same criteria with every configured frequency read as angular (rad/s
  // written in Hz fields, i.e. divided by 2 pi); drift ranges scale alike.
  const Setup ang(IONPULSE_SOURCE_DIR "/configs/angular_units.json");
  const Robustness a = robustness(ang, 1.0 / kTwoPi);
  std::printf("  info (angular reading): converged %s; drift %.3e, time %.3e, 2D %.3e, "
              "normal drift %.3e (ratio %.1f), zero noise %.2e, optimizer %.2f s\n",
              a.converged ? "yes" : "no", a.drift, a.time, a.combined, a.normal_drift,
              a.normal_drift / a.drift, a.zero, a.opt_seconds);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
