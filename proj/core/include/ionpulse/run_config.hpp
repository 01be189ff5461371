#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/cost.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/dynamics_oracle.hpp"
#include "ionpulse/noise_sweep.hpp"
#include "ionpulse/optimizer.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

/// Everything a CLI run needs. Frequencies are ordinary (Hz) at this level
/// and converted to rad/s by the accessors. Ion indices are 0-based.
///
/// Defaults: four 171Yb+ ions, w_z/2pi = 1.2 MHz, w_x/2pi = 3.6 MHz,
/// mu/2pi = 3.15 MHz, tau = 100 us, Omega_max/2pi = 2 MHz, T = 1 uK,
/// ions 0 and 2 addressed, L = 20 symmetric shared segments.
struct RunConfig {
  struct Trap {
    int ion_count = 4;
    double ion_mass_amu = 171.0;
    double axial_freq_hz = 1.2e6;
    double transverse_freq_hz = 3.6e6;
    double wavevector_difference = 1.4142135623730951 * kTwoPi / 355e-9;
    std::optional<double> lamb_dicke_scale;
    bool operator==(const Trap&) const = default;
  } trap;

  struct Drive {
    double mu_hz = 3.15e6;
    std::array<int, 2> addressed{0, 2};
    bool operator==(const Drive&) const = default;
  } drive;

  struct Pulse {
    double tau_s = 100e-6;
    int segments = 20;
    double omega_max_hz = 2e6;
    bool shared = true;
    bool symmetric = true;
    bool operator==(const Pulse&) const = default;
  } pulse;

  struct Cost {
    CostVariant variant = CostVariant::kFullyRobust;
    CostWeights weights;
    double epsilon = 1e-12;
    double tilde_rate_hz = 1e3;
    bool operator==(const Cost& o) const {
      return variant == o.variant && weights.beta == o.weights.beta &&
             weights.beta_tilde == o.weights.beta_tilde &&
             weights.theta == o.weights.theta &&
             weights.theta_tilde == o.weights.theta_tilde && epsilon == o.epsilon &&
             tilde_rate_hz == o.tilde_rate_hz;
    }
  } cost;

  struct Optimizer {
    int max_iterations = 2000;
    double cost_tolerance = 1e-10;
    double step_tolerance = 1e-12;
    int restarts = 16;
    std::uint64_t seed = 20240611;
    int threads = 0;
    bool operator==(const Optimizer&) const = default;
  } optimizer;

  struct Sweep {
    SweepMode mode = SweepMode::kDrift1D;
    double drift_min_hz = -1e4;
    double drift_max_hz = 1e4;
    int drift_points = 201;
    double scale_min = 0.98;
    double scale_max = 1.02;
    int scale_points = 201;
    bool operator==(const Sweep&) const = default;
  } sweep;

  struct Env {
    double temperature_k = 1e-6;
    bool operator==(const Env&) const = default;
  } env;

  bool operator==(const RunConfig&) const = default;

  /// Cross-field checks (addressed ions inside the chain, positive values,
  /// parameter count). Throws ConfigError.
  void validate() const;

  TrapConfig trap_config() const;
  DriveConfig drive_config() const;  ///< zero drift
  PulseLayout layout() const;
  CostSpec cost_spec() const;
  OptimizerConfig optimizer_config() const;
  SweepSpec sweep_spec() const;
  double omega_max() const { return to_angular(pulse.omega_max_hz); }
};

/// Parses and validates JSON text. Missing keys keep their defaults; unknown
/// keys, wrong types, invalid values and malformed JSON throw ConfigError whose message starts with the
/// offending location (JSON pointer, or line:column for syntax errors).
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Full JSON with every field written out.
std::string dump_run_config(const RunConfig& config);

/// Standalone sweep spec file: the keys of the config's "sweep" section,
/// applied on top of `base`.
SweepSpec parse_sweep_spec(const std::string& text, SweepSpec base = {});

/// Oracle settings file: {modes, fock_cutoff, steps_per_cycle,
/// min_steps_per_segment, dimension_cap, assemble_cap,
/// thermal_weight_tolerance}.
OracleConfig parse_oracle_config(const std::string& text, OracleConfig base = {});

}  // namespace ionpulse
