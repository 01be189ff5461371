#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionpulse/constants.hpp"

namespace ionpulse {

/// Linear Paul-trap chain parameters. Frequencies are ordinary (Hz).
struct TrapConfig {
  int ion_count = 4;
  double ion_mass_kg = 171.0 * kAtomicMassUnit;
  double axial_freq_hz = 1.2e6;
  double transverse_freq_hz = 3.6e6;
  /// Raman wavevector difference, rad/m. Default: counter-propagating
  /// components of two 355 nm beams crossing at 90 degrees.
  double wavevector_difference = 1.4142135623730951 * kTwoPi / 355e-9;
  /// If set, replaces dK*sqrt(hbar/(2 M w_x)): the single-ion Lamb-Dicke
  /// parameter at the transverse trap frequency. The 1/sqrt(nu_k) mode
  /// dependence is kept.
  std::optional<double> lamb_dicke_scale;

  /// Throws ConfigError on non-positive inputs or a buckled chain.
  void validate() const;

  double axial_angular() const noexcept { return to_angular(axial_freq_hz); }
  double transverse_angular() const noexcept {
    return to_angular(transverse_freq_hz);
  }
  /// Coulomb length scale l = (e^2 / (4 pi eps0 M w_z^2))^(1/3), meters.
  double length_scale() const;
};

struct NormalModes {
  Eigen::VectorXd frequencies;  ///< nu_k, rad/s, ascending
  Eigen::MatrixXd vectors;      ///< b(j, k): ion j, mode k
};

struct LambDicke {
  Eigen::MatrixXd eta;  ///< eta(j, k)
  std::optional<std::string> warning;
};

/// Equilibrium geometry and transverse phonon modes of a linear chain.
///
/// Plain aggregate so callers (and tests) can also assemble a synthetic
/// chain directly from mode frequencies and Lamb-Dicke parameters.
struct ChainModel {
  Eigen::VectorXd positions;       ///< meters, ascending
  Eigen::VectorXd mode_freqs;      ///< rad/s, ascending
  Eigen::MatrixXd mode_matrix;     ///< b(j, k)
  Eigen::MatrixXd lamb_dicke;      ///< eta(j, k)
  std::vector<std::string> warnings;

  int ion_count() const noexcept {
    return static_cast<int>(lamb_dicke.rows());
  }
  int mode_count() const noexcept {
    return static_cast<int>(mode_freqs.size());
  }
};

/// Dimensionless equilibrium positions u = x / l of n ions, found by damped
/// Newton iteration on the force balance u_i - sum_{m != i} sgn(u_i - u_m)
/// / (u_i - u_m)^2 = 0. Throws SolverError if the residual stays above
/// tolerance after the iteration budget.
Eigen::VectorXd solve_equilibrium_dimensionless(int n, int max_iterations = 200,
                                                double tolerance = 1e-12);

/// Equilibrium positions in meters.
Eigen::VectorXd solve_equilibrium(const TrapConfig& config);

/// Transverse normal modes from the dimensionless Hessian
///   A_ii = (w_x / w_z)^2 - sum_{m != i} 1 / |u_i - u_m|^3
///   A_ij = 1 / |u_i - u_j|^3
/// with nu_k = w_z sqrt(lambda_k). Each mode vector is flipped so that its
/// largest-magnitude entry is positive. Throws InstabilityError on
/// lambda_k <= 0.
NormalModes transverse_modes(const TrapConfig& config,
                             const Eigen::VectorXd& positions);

/// eta(j, k) = dK b(j, k) sqrt(hbar / (2 M nu_k)), or the configured scale.
/// A warning is attached if any |eta| >= 0.3.
LambDicke lamb_dicke_matrix(const TrapConfig& config, const NormalModes& modes);

/// solve_equilibrium + transverse_modes + lamb_dicke_matrix.
ChainModel build_chain(const TrapConfig& config);

}  // namespace ionpulse
