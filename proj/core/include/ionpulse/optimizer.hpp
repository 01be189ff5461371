#pragma once

#include <cstdint>
#include <vector>

#include "ionpulse/cost.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

struct OptimizerConfig {
  int max_iterations = 2000;         ///< per restart; 0 returns the start points
  double cost_tolerance = 1e-10;     ///< stop once C drops below this
  double step_tolerance = 1e-12;     ///< relative step norm
  int restarts = 16;
  std::uint64_t seed = 20240611;
  int threads = 0;                   ///< 0 = hardware concurrency
  double init_amplitude_low = 0.1;   ///< fractions of omega_max
  double init_amplitude_high = 0.9;

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double cost = 0.0;
  CostBreakdown groups;
};

struct RestartSummary {
  int index = 0;
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
};

struct OptimizeResult {
  ParamVector best;            ///< phases wrapped into (-pi, pi]
  CostValue cost;
  bool converged = false;
  int best_restart = 0;
  std::vector<TracePoint> trace;           ///< per-iteration trace of the best restart
  std::vector<RestartSummary> restarts;    ///< in restart order
  std::vector<double> best_so_far;         ///< running minimum over restarts
};

/// Start point of one restart. Amplitudes uniform in [low, high] * omega_max,
/// phases uniform in (-pi, pi]. Drawn from std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed) + restart), so neighbouring seeds do not
/// share restarts; doubles are (x >> 11) * 2^-53 so the stream
/// is identical on every platform.
ParamVector initial_point(const PulseLayout& layout, const OptimizerConfig& config,
                          int restart);

/// Multi-start projected Levenberg-Marquardt on CostFunction::residuals.
/// Amplitudes are kept in [0, omega_max] by projection; phases move freely
/// and are wrapped on output. Deterministic for a given seed whatever the
/// thread count.
OptimizeResult optimize(const CostFunction& cost, const OptimizerConfig& config);

OptimizeResult optimize(const PulseLayout& layout, const ChainModel& chain,
                        const DriveConfig& drive, const CostSpec& spec,
                        const OptimizerConfig& config);

}  // namespace ionpulse
