#pragma once

#include <Eigen/Dense>

#include "ionpulse/coupling_integrals.hpp"

namespace ionpulse {

struct ThermalEnv {
  double temperature = 0.0;  ///< kelvin
  Eigen::VectorXd occupations;  ///< nbar_k
};

/// Bose-Einstein occupation e^{-x} / (1 - e^{-x}), x = hbar nu_k / (k_B T).
/// T = 0 gives exactly zero.
Eigen::VectorXd thermal_occupations(const Eigen::VectorXd& mode_freqs,
                                    double temperature);

ThermalEnv make_thermal_env(const Eigen::VectorXd& mode_freqs, double temperature);

struct FidelityResult {
  double fidelity = 0.0;
  double phase_factor = 0.0;   ///< |cos(sum theta - pi/4)|
  double phonon_factor = 0.0;  ///< prod_k exp(-sum_j |beta_jk|^2 (nbar_k + 1/2))
  double infidelity() const noexcept { return 1.0 - fidelity; }
};

/// MS-gate fidelity F = phase_factor * phonon_factor.
FidelityResult ms_fidelity(const CouplingReport& report, const ThermalEnv& env);

}  // namespace ionpulse
