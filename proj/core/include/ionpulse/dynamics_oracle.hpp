#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

/// Truncated-Fock propagation of the bichromatic spin-dependent-force
/// Hamiltonian
///   H(t) = i sum_j Omega_j sigma_x^j sum_k eta_jk (a_k e^{i(B_k t + phi_j)} - h.c.)
/// on the two addressed ions.
///
/// H commutes with both sigma_x^j, so each of the four sigma_x sectors
/// evolves on the phonons alone, and inside a sector the modes decouple.
/// The propagator is stored as those 4 x M small factors.
struct OracleConfig {
  std::vector<int> modes;         ///< included mode indices; empty = all
  int fock_cutoff = 10;           ///< n_max per mode
  int steps_per_cycle = 50;       ///< micro-steps per 2 pi of the fastest phase
  int min_steps_per_segment = 4;
  std::size_t dimension_cap = std::size_t{1} << 16;  ///< 4 prod (n_max + 1)
  std::size_t assemble_cap = 4096;  ///< largest dense U built for checks
  double thermal_weight_tolerance = 1e-12;

  void validate() const;
};

/// Spin sector index: bit s set means sigma_x^{addressed[s]} = -1.
inline int sector_sign(int sector, int slot) { return (sector >> slot) & 1 ? -1 : 1; }

struct PropagatedGate {
  int fock_cutoff = 0;
  std::vector<int> modes;
  /// factors[sector][m]: phonon propagator of included mode m.
  std::array<std::vector<Eigen::MatrixXcd>, 4> factors;
  /// Largest population in the top Fock level after evolving the vacuum.
  double leakage = 0.0;

  std::size_t dimension() const;
  /// max_{sector, mode} ||U^dag U - I||_max over the factors.
  double factor_defect() const;
  /// Dense U in the sigma_x eigenbasis (sector-major, then modes in order).
  /// Throws OracleError above `cap`.
  Eigen::MatrixXcd full_unitary(std::size_t cap) const;
  /// ||U^dag U - I||_max of the dense U when it fits under `cap`, else the
  /// factor-wise bound.
  double unitarity_defect(std::size_t cap) const;
};

/// Propagates over [0, tau] with 4th-order Magnus steps (two Gauss points)
/// and an exact Hermitian exponential per step. Throws OracleError if the
/// Hilbert dimension exceeds the cap or the result is not finite.
PropagatedGate propagate(const PulseSchedule& schedule, const ChainModel& chain,
                         const DriveConfig& drive, const OracleConfig& config);

struct OracleFidelity {
  double fidelity = 0.0;   ///< |Tr(U_g^dag <U>_rho) / 4|^2
  double overlap = 0.0;    ///< |Tr(U_g^dag <U>_rho) / 4|, the unsquared form
  double thermal_weight = 1.0;  ///< Fock weight kept in the thermal average
};

/// Spin-sector process overlap with U_g = exp(-i pi/4 sigma_x sigma_x) after
/// tracing the phonons over the thermal state. Occupations are indexed by
/// chain mode; the gate's included modes pick their entries.
OracleFidelity gate_fidelity_exact(const PropagatedGate& gate, const ThermalEnv& env,
                                   const OracleConfig& config);

}  // namespace ionpulse
