#include "ionpulse/noise_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ionpulse/errors.hpp"

namespace ionpulse {

std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::kDrift1D: return "drift_1d";
    case SweepMode::kTime1D: return "time_1d";
    case SweepMode::kCombined2D: return "combined_2d";
  }
  return "unknown";
}

SweepMode parse_sweep_mode(const std::string& name) {
  if (name == "drift_1d" || name == "drift") return SweepMode::kDrift1D;
  if (name == "time_1d" || name == "time") return SweepMode::kTime1D;
  if (name == "combined_2d" || name == "combined") return SweepMode::kCombined2D;
  throw ConfigError("unknown sweep mode '" + name +
                    "' (expected drift_1d, time_1d or combined_2d)");
}

void SweepSpec::validate() const {
  if (!std::isfinite(drift_min_hz) || !std::isfinite(drift_max_hz) ||
      drift_min_hz > drift_max_hz) {
    throw ConfigError("sweep drift range must be finite with min <= max");
  }
  if (!std::isfinite(scale_min) || !std::isfinite(scale_max) || scale_min > scale_max ||
      !(scale_min > 0.0)) {
    throw ConfigError("sweep time-scale range must be positive with min <= max");
  }
  if (mode != SweepMode::kTime1D && drift_points < 2) {
    throw ConfigError("sweep needs at least 2 drift points");
  }
  if (mode != SweepMode::kDrift1D && scale_points < 2) {
    throw ConfigError("sweep needs at least 2 time-scale points");
  }
}

std::vector<double> grid_axis(double a, double b, int points, double anchor) {
  std::vector<double> axis(static_cast<std::size_t>(std::max(points, 1)));
  if (points <= 1) {
    axis[0] = a;
    return axis;
  }
  for (int i = 0; i < points; ++i) {
    // Fill from both ends so a symmetric range gives a symmetric grid.
    const double f = static_cast<double>(i) / (points - 1);
    axis[static_cast<std::size_t>(i)] = f < 0.5 ? a + (b - a) * f : b - (b - a) * (1.0 - f);
  }
  // Endpoints stay put; the anchor replaces the closest interior node.
  if (a < anchor && anchor < b && points > 2) {
    auto nearest = std::min_element(axis.begin() + 1, axis.end() - 1, [&](double x, double y) {
      return std::abs(x - anchor) < std::abs(y - anchor);
    });
    *nearest = anchor;
  }
  return axis;
}

std::vector<double> SweepSpec::drift_axis() const {
  if (mode == SweepMode::kTime1D) return {0.0};
  return grid_axis(drift_min_hz, drift_max_hz, drift_points, 0.0);
}

std::vector<double> SweepSpec::scale_axis() const {
  if (mode == SweepMode::kDrift1D) return {1.0};
  return grid_axis(scale_min, scale_max, scale_points, 1.0);
}

double SweepGrid::max_infidelity() const {
  double worst = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& r : rows) {
    if (!r.ok()) continue;
    if (std::isnan(worst) || r.infidelity > worst) worst = r.infidelity;
  }
  return worst;
}

std::size_t SweepGrid::flagged() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
}

SweepRow sweep_point(const PulseSchedule& schedule, const ChainModel& chain,
                     const DriveConfig& drive, const ThermalEnv& env, double delta_hz,
                     double tau_scale) {
  SweepRow row;
  row.delta_hz = delta_hz;
  row.tau_scale = tau_scale;
  DriveConfig perturbed = drive;
  perturbed.drift = drive.drift + to_angular(delta_hz);
  try {
    const PulseSchedule stretched =
        tau_scale == 1.0 ? schedule : schedule.stretched(tau_scale);
    const CouplingReport rep = evaluate_couplings(stretched, chain, perturbed);
    const FidelityResult fid = ms_fidelity(rep, env);
    row.infidelity = fid.infidelity();
    row.beta_sq_total = rep.beta_sq_total();
    row.theta_total = rep.theta_total;
    row.phase_factor = fid.phase_factor;
    row.phonon_factor = fid.phonon_factor;
  } catch (const ResonanceError&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.infidelity = row.beta_sq_total = row.theta_total = nan;
    row.phase_factor = row.phonon_factor = nan;
    row.flag = "resonant";
  }
  return row;
}

SweepGrid sweep(const PulseSchedule& schedule, const ChainModel& chain,
                const DriveConfig& drive, const ThermalEnv& env, const SweepSpec& spec,
                int threads) {
  spec.validate();
  const std::vector<double> drifts = spec.drift_axis();
  const std::vector<double> scales = spec.scale_axis();

  SweepGrid grid;
  grid.mode = spec.mode;
  grid.drift_points = static_cast<int>(drifts.size());
  grid.scale_points = static_cast<int>(scales.size());
  const std::size_t total = drifts.size() * scales.size();
  grid.rows.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        grid.rows[i] = sweep_point(schedule, chain, drive, env, drifts[i / scales.size()],
                                   scales[i % scales.size()]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int n = threads > 0 ? threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), total));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

std::vector<double> coupling_trajectory(const PulseSchedule& schedule,
                                        const ChainModel& chain,
                                        const DriveConfig& drive,
                                        const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(theta_until(schedule, chain, drive, t));
  return out;
}

}  // namespace ionpulse
