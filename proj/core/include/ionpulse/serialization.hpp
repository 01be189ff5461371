#pragma once

#include <cstdint>
#include <string>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/noise_sweep.hpp"
#include "ionpulse/optimizer.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

/// Pulse file:
///   {"tau_s_us": 100, "addressed": [0, 2], "shared": true,
///    "segments": [{"omega_mhz": ..., "phi_rad": ...}, ...]}
/// omega_mhz is Omega / 2pi in MHz. Per-ion pulses add "segments_second"
/// for the second addressed ion.
std::string pulse_to_json(const PulseSchedule& schedule);

/// Throws ConfigError (path-qualified) on schema errors or amplitudes above
/// omega_max beyond rounding.
PulseSchedule pulse_from_json(const std::string& text, double omega_max);
PulseSchedule load_pulse(const std::string& path, double omega_max);

std::string run_report_json(const OptimizeResult& result, std::uint64_t seed,
                            CostVariant variant);
std::string coupling_report_json(const CouplingReport& report,
                                 const FidelityResult& fidelity);
std::string chain_json(const ChainModel& chain);

/// Columns: delta_hz,tau_scale,infidelity,beta_sq_total,theta_total,
/// phase_factor,phonon_factor,flag
std::string sweep_csv(const SweepGrid& grid);
std::string sweep_json(const SweepGrid& grid);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// Writes to a temporary file in the same directory, then renames it over
/// `path`. Throws Error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ionpulse
