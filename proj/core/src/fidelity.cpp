#include "ionpulse/fidelity.hpp"

#include <cmath>

#include "ionpulse/constants.hpp"
#include "ionpulse/errors.hpp"

namespace ionpulse {

Eigen::VectorXd thermal_occupations(const Eigen::VectorXd& mode_freqs,
                                    double temperature) {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  Eigen::VectorXd nbar = Eigen::VectorXd::Zero(mode_freqs.size());
  if (temperature == 0.0) return nbar;
  for (Eigen::Index k = 0; k < mode_freqs.size(); ++k) {
    const double x = kHbar * mode_freqs(k) / (kBoltzmann * temperature);
    // e^{-x} / (1 - e^{-x}) = 1 / expm1(x)
    nbar(k) = 1.0 / std::expm1(x);
  }
  return nbar;
}

ThermalEnv make_thermal_env(const Eigen::VectorXd& mode_freqs, double temperature) {
  return {temperature, thermal_occupations(mode_freqs, temperature)};
}

FidelityResult ms_fidelity(const CouplingReport& report, const ThermalEnv& env) {
  if (env.occupations.size() != report.beta.cols()) {
    throw ConfigError("thermal environment and coupling report cover different modes");
  }
  FidelityResult out;
  out.phase_factor = std::abs(std::cos(report.theta_total - kPi / 4.0));
  double exponent = 0.0;
  for (Eigen::Index k = 0; k < report.beta.cols(); ++k) {
    exponent += report.beta.col(k).cwiseAbs2().sum() * (env.occupations(k) + 0.5);
  }
  out.phonon_factor = std::exp(-exponent);
  out.fidelity = out.phase_factor * out.phonon_factor;
  return out;
}

}  // namespace ionpulse
