#pragma once

#include <string>
#include <vector>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

enum class SweepMode { kDrift1D, kTime1D, kCombined2D };

std::string to_string(SweepMode m);
SweepMode parse_sweep_mode(const std::string& name);

/// Noise grid. Drift is an ordinary frequency (Hz) added to every sideband;
/// time noise stretches every segment by `scale` at fixed amplitude/phase.
struct SweepSpec {
  SweepMode mode = SweepMode::kDrift1D;
  double drift_min_hz = -1e4;
  double drift_max_hz = 1e4;
  int drift_points = 201;
  double scale_min = 0.98;
  double scale_max = 1.02;
  int scale_points = 201;

  void validate() const;
  /// Grid axes. A range that contains the zero-noise value (0 Hz, scale 1)
  /// contains it exactly once it has three or more points.
  std::vector<double> drift_axis() const;
  std::vector<double> scale_axis() const;
};

/// Evenly spaced nodes on [a, b]. The endpoints are exact; when a < anchor < b
/// and there is an interior node, the one closest to `anchor` is set to it.
std::vector<double> grid_axis(double a, double b, int points, double anchor);

struct SweepRow {
  double delta_hz = 0.0;
  double tau_scale = 1.0;
  double infidelity = 0.0;
  double beta_sq_total = 0.0;
  double theta_total = 0.0;
  double phase_factor = 0.0;
  double phonon_factor = 0.0;
  std::string flag = "ok";  ///< "ok" or "resonant"; numbers are NaN otherwise

  bool ok() const noexcept { return flag == "ok"; }
};

struct SweepGrid {
  SweepMode mode = SweepMode::kDrift1D;
  int drift_points = 1;
  int scale_points = 1;
  std::vector<SweepRow> rows;  ///< drift-major: row = i_drift * scale_points + i_scale

  /// Largest infidelity over unflagged rows (NaN if none).
  double max_infidelity() const;
  std::size_t flagged() const;
};

/// Recomputes beta/theta exactly at every (drift, scale) node and applies
/// the fidelity formula. Nodes are independent and evaluated on up to
/// `threads` threads (0 = hardware concurrency); row order never depends on
/// the thread count.
SweepGrid sweep(const PulseSchedule& schedule, const ChainModel& chain,
                const DriveConfig& drive, const ThermalEnv& env, const SweepSpec& spec,
                int threads = 0);

/// One node of the sweep, the same computation `sweep` performs.
SweepRow sweep_point(const PulseSchedule& schedule, const ChainModel& chain,
                     const DriveConfig& drive, const ThermalEnv& env, double delta_hz,
                     double tau_scale);

/// Entangling angle accumulated up to each time (partial gate).
std::vector<double> coupling_trajectory(const PulseSchedule& schedule,
                                        const ChainModel& chain,
                                        const DriveConfig& drive,
                                        const std::vector<double>& times);

}  // namespace ionpulse
