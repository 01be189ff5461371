#pragma once

#include <numbers>

namespace ionpulse {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double kHbar = 1.054571817e-34;             // J s
inline constexpr double kBoltzmann = 1.380649e-23;           // J / K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F / m
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;     // kg

/// Ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double to_angular(double hz) noexcept { return kTwoPi * hz; }
/// Angular frequency (rad/s) to ordinary frequency (Hz).
constexpr double to_hz(double rad_per_s) noexcept { return rad_per_s / kTwoPi; }

}  // namespace ionpulse
