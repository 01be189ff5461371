#include <doctest.h>

#include <cmath>

#include "ionpulse/constants.hpp"
#include "ionpulse/fidelity.hpp"

using namespace ionpulse;

namespace {

CouplingReport report(int modes, double theta_total) {
  CouplingReport r;
  r.beta = Eigen::MatrixXcd::Zero(2, modes);
  r.beta_tilde = Eigen::MatrixXcd::Zero(2, modes);
  r.theta_total = theta_total;
  return r;
}

ThermalEnv cold(int modes) { return {0.0, Eigen::VectorXd::Zero(modes)}; }

}  // namespace

TEST_SUITE("fidelity") {

TEST_CASE("perfect and idle gates") {
  FidelityResult f = ms_fidelity(report(4, kPi / 4), cold(4));
  CHECK(f.fidelity == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.infidelity() == doctest::Approx(0.0));

  f = ms_fidelity(report(4, 0.0), cold(4));
  CHECK(f.fidelity == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(f.phase_factor == doctest::Approx(std::sqrt(0.5)));
  CHECK(f.phonon_factor == 1.0);
}

TEST_CASE("residual displacement") {
  CouplingReport r = report(1, kPi / 4);
  r.beta(0, 0) = {std::sqrt(0.5), 0.0};
  r.beta(1, 0) = {0.0, std::sqrt(0.5)};
  FidelityResult f = ms_fidelity(r, cold(1));
  CHECK(f.fidelity == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  // Thermal occupation adds (nbar + 1/2) weight.
  ThermalEnv warm{1e-3, Eigen::VectorXd::Constant(1, 1.0)};
  f = ms_fidelity(r, warm);
  CHECK(f.phonon_factor == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
}

TEST_CASE("phase factor is an absolute cosine") {
  const FidelityResult a = ms_fidelity(report(2, kPi / 4 + 0.3), cold(2));
  const FidelityResult b = ms_fidelity(report(2, kPi / 4 - 0.3), cold(2));
  CHECK(a.fidelity == doctest::Approx(std::cos(0.3)));
  CHECK(a.fidelity == doctest::Approx(b.fidelity));
  CHECK(ms_fidelity(report(1, kPi / 4 + kPi), cold(1)).fidelity == doctest::Approx(1.0));
}

TEST_CASE("Bose-Einstein occupations") {
  Eigen::VectorXd nu(3);
  nu << to_angular(2.5e6), to_angular(3e6), to_angular(3.6e6);
  CHECK(thermal_occupations(nu, 0.0).cwiseAbs().maxCoeff() == 0.0);

  const double t = kHbar * nu(0) / (kBoltzmann * std::log(2.0));
  CHECK(thermal_occupations(nu, t)(0) == doctest::Approx(1.0).epsilon(1e-12));

  const double expected = std::exp(-kHbar * nu(0) / (kBoltzmann * 1e-6));
  const double nbar = thermal_occupations(nu, 1e-6)(0);
  CHECK(nbar < 1e-50);
  CHECK(nbar == doctest::Approx(expected).epsilon(1e-10));

  const ThermalEnv env = make_thermal_env(nu, 1e-6);
  CHECK(env.temperature == 1e-6);
  CHECK(env.occupations.size() == 3);
}

}
