#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/constants.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

/// Bichromatic drive: detuning mu and a uniform sideband drift delta, rad/s.
/// Mode k sees B_k = mu - nu_k + delta.
struct DriveConfig {
  double detuning = 0.0;
  double drift = 0.0;
};

/// |B_k| below this (rad/s) is rejected as resonant.
inline constexpr double kResonanceThreshold = kTwoPi * 100.0;

/// B_k = mu - nu_k + delta for every mode. Throws ResonanceError if any
/// |B_k| < kResonanceThreshold.
Eigen::VectorXd sideband_freqs(const ChainModel& chain, const DriveConfig& drive);

/// Couplings of one pulse on one chain, indexed by addressed slot (row) and
/// mode (column).
struct CouplingReport {
  Eigen::MatrixXcd beta;        ///< beta_{j,k}(tau), dimensionless
  Eigen::MatrixXcd beta_tilde;  ///< d beta / dB_k, seconds
  /// Ordered-pair phases theta_{a,b}, theta_{b,a}; their sum is the
  /// entangling angle compared against pi/4.
  std::array<double, 2> theta_pair{0.0, 0.0};
  std::array<double, 2> theta_tilde_pair{0.0, 0.0};
  double theta_total = 0.0;        ///< radians
  double theta_tilde_total = 0.0;  ///< radians * seconds (d theta / d delta)

  /// sum_{j,k} |beta_{j,k}|^2
  double beta_sq_total() const { return beta.cwiseAbs2().sum(); }
};

/// Closed-form beta_{j,k}: -i sum_l S^l e^{i B l tau_s} (1 - e^{-i B tau_s}) / B.
Eigen::MatrixXcd beta_closed_form(const PulseSchedule& schedule,
                                  const ChainModel& chain,
                                  const DriveConfig& drive);

/// d beta_{j,k} / dB_k = i eta int Omega e^{i phi} e^{i B t} t dt, closed form.
Eigen::MatrixXcd beta_tilde(const PulseSchedule& schedule, const ChainModel& chain,
                            const DriveConfig& drive);

/// Entangling angle summed over both ordered pairs of addressed ions.
double theta(const PulseSchedule& schedule, const ChainModel& chain,
             const DriveConfig& drive);

/// d theta / d delta with the drift applied to every mode.
double theta_tilde(const PulseSchedule& schedule, const ChainModel& chain,
                   const DriveConfig& drive);

/// All four quantities in one pass.
CouplingReport evaluate_couplings(const PulseSchedule& schedule,
                                  const ChainModel& chain,
                                  const DriveConfig& drive);

/// Entangling angle accumulated up to time t in [0, tau] (partial gate).
double theta_until(const PulseSchedule& schedule, const ChainModel& chain,
                   const DriveConfig& drive, double t);

/// Precomputed per-segment integrals for a fixed (chain, drive, timing).
///
/// Everything that does not depend on the segment weights
/// c_{s,l} = Omega_{s,l} e^{i phi_{s,l}} is tabulated once, so repeated
/// evaluation inside the optimizer is O(N L + L^2).
class CouplingKernel {
 public:
  CouplingKernel(const ChainModel& chain, const DriveConfig& drive,
                 int segment_count, double duration, std::array<int, 2> addressed);

  int segment_count() const noexcept { return segments_; }
  int mode_count() const noexcept { return static_cast<int>(sideband_.size()); }

  using Weights = std::array<Eigen::VectorXcd, 2>;
  static Weights weights_of(const PulseSchedule& schedule);

  CouplingReport evaluate(const Weights& c) const;

  /// eta_{slot,k}: Lamb-Dicke factor of the addressed ion on mode k.
  const Eigen::MatrixXd& eta() const noexcept { return eta_; }
  /// int_{segment l} e^{i B_k t} dt, shape (mode, segment).
  const Eigen::MatrixXcd& segment_integral() const noexcept { return e_; }
  /// d/dB_k of segment_integral.
  const Eigen::MatrixXcd& segment_integral_db() const noexcept { return de_; }
  /// theta_{a,b} = Im(c_a^T K c_b^*), K lower triangular incl. diagonal.
  const Eigen::MatrixXcd& theta_kernel() const noexcept { return k_; }
  const Eigen::MatrixXcd& theta_tilde_kernel() const noexcept { return dk_; }

 private:
  int segments_;
  Eigen::VectorXd sideband_;
  Eigen::MatrixXd eta_;
  Eigen::MatrixXcd e_, de_, k_, dk_;
};

}  // namespace ionpulse
