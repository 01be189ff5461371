#pragma once

#include <Eigen/Dense>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

// Numerical-integration oracles for the closed forms. They evaluate the raw
// integrands through sample() and never touch the segment algebra.

/// Adaptive Gauss-Kronrod integral of Omega e^{i phi} eta e^{i B t} over
/// [0, tau] on panels aligned to segment boundaries and at most pi radians of
/// the sideband phase wide. Throws QuadratureError if the error
/// estimate exceeds the tolerance.
Eigen::MatrixXcd beta_quadrature(const PulseSchedule& schedule,
                                 const ChainModel& chain, const DriveConfig& drive,
                                 double tolerance = 1e-13);

/// Same, for i eta int Omega e^{i phi} e^{i B t} t dt.
Eigen::MatrixXcd beta_tilde_quadrature(const PulseSchedule& schedule,
                                       const ChainModel& chain,
                                       const DriveConfig& drive,
                                       double tolerance = 1e-13);

struct ThetaQuadrature {
  double theta_total = 0.0;
  double theta_tilde_total = 0.0;
};

/// Tensor Gauss-Legendre over the ordered triangle t2 < t1, with panels
/// aligned to segment boundaries and subdivided so that no panel spans more
/// than `max_phase` radians of the fastest sideband.
ThetaQuadrature theta_quadrature(const PulseSchedule& schedule,
                                 const ChainModel& chain, const DriveConfig& drive,
                                 double max_phase = 0.5);

}  // namespace ionpulse
