#include <doctest.h>

#include <cmath>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/errors.hpp"

using namespace ionpulse;

TEST_SUITE("chain") {

TEST_CASE("single ion sits at the trap centre") {
  const Eigen::VectorXd u = solve_equilibrium_dimensionless(1);
  REQUIRE(u.size() == 1);
  CHECK(u(0) == 0.0);

  TrapConfig t;
  t.ion_count = 1;
  const ChainModel c = build_chain(t);
  CHECK(c.mode_freqs(0) == doctest::Approx(t.transverse_angular()).epsilon(1e-14));
  CHECK(std::abs(c.mode_matrix(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("two and three ion equilibria match the force balance") {
  const Eigen::VectorXd u2 = solve_equilibrium_dimensionless(2);
  const double a2 = std::cbrt(0.25);
  CHECK(std::abs(u2(0) + a2) / a2 < 1e-10);
  CHECK(std::abs(u2(1) - a2) / a2 < 1e-10);

  const Eigen::VectorXd u3 = solve_equilibrium_dimensionless(3);
  const double a3 = std::cbrt(1.25);
  CHECK(std::abs(u3(0) + a3) / a3 < 1e-10);
  CHECK(std::abs(u3(1)) < 1e-14);
  CHECK(std::abs(u3(2) - a3) / a3 < 1e-10);

  TrapConfig t;
  t.ion_count = 2;
  const Eigen::VectorXd x = solve_equilibrium(t);
  CHECK(x(1) == doctest::Approx(a2 * t.length_scale()).epsilon(1e-12));
}

TEST_CASE("two ion transverse modes are rocking and centre of mass") {
  TrapConfig t;
  t.ion_count = 2;
  const ChainModel c = build_chain(t);
  const double wx = t.transverse_angular(), wz = t.axial_angular();
  CHECK(c.mode_freqs(0) == doctest::Approx(std::sqrt(wx * wx - wz * wz)).epsilon(1e-12));
  CHECK(c.mode_freqs(1) == doctest::Approx(wx).epsilon(1e-12));
  CHECK(c.mode_matrix(0, 1) == doctest::Approx(c.mode_matrix(1, 1)));
  CHECK(c.mode_matrix(0, 0) == doctest::Approx(-c.mode_matrix(1, 0)));
}

TEST_CASE("mode matrix is orthonormal and ordered") {
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    TrapConfig t;
    t.ion_count = n;
    t.transverse_freq_hz = 6e6;
    const ChainModel c = build_chain(t);
    const Eigen::MatrixXd g = c.mode_matrix.transpose() * c.mode_matrix;
    CHECK((g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 1; k < n; ++k) CHECK(c.mode_freqs(k) > c.mode_freqs(k - 1));
    // The highest transverse mode is the centre-of-mass mode at w_x.
    CHECK(c.mode_freqs(n - 1) == doctest::Approx(t.transverse_angular()).epsilon(1e-10));
    for (int k = 0; k < n; ++k) {
      // First entry of (near) largest magnitude is positive; mirror
      // symmetric modes tie between the two ends.
      const double top = c.mode_matrix.col(k).cwiseAbs().maxCoeff();
      Eigen::Index arg = 0;
      while (std::abs(std::abs(c.mode_matrix(arg, k)) - top) >= 1e-9) ++arg;
      CHECK(c.mode_matrix(arg, k) > 0.0);
    }
  }
}

TEST_CASE("default four ion chain against an independent evaluation") {
  // Frozen from a separate numpy/scipy evaluation with CODATA constants.
  const double freqs_hz[] = {2641588.124625425, 3081695.173698243, 3394112.5496954275,
                             3599999.999999999};
  const double abs_eta[4][4] = {
      {1.785059924471611e-02, 3.875718470378781e-02, 4.979670807462666e-02,
       3.585880490442416e-02},
      {5.644574398978999e-02, 3.875718470378780e-02, 1.574788490177518e-02,
       3.585880490442415e-02},
      {5.644574398978994e-02, 3.875718470378784e-02, 1.574788490177516e-02,
       3.585880490442417e-02},
      {1.785059924471612e-02, 3.875718470378779e-02, 4.979670807462666e-02,
       3.585880490442419e-02}};
  const double u_outer = 1.4368019919241755, u_inner = 0.45437928068567085;
  const double length = 2.4267865837859508e-06;

  const ChainModel c = build_chain(TrapConfig{});
  REQUIRE(c.mode_count() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(to_hz(c.mode_freqs(k)) == doctest::Approx(freqs_hz[k]).epsilon(1e-10));
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(c.lamb_dicke(j, k)) == doctest::Approx(abs_eta[j][k]).epsilon(1e-9));
    }
  }
  CHECK(c.positions(3) == doctest::Approx(u_outer * length).epsilon(1e-9));
  CHECK(c.positions(2) == doctest::Approx(u_inner * length).epsilon(1e-9));
  CHECK(c.warnings.empty());

  // Relative signs between ions 0 and 2, which are what the gate sees.
  const double sign02[] = {1.0, -1.0, -1.0, 1.0};
  for (int k = 0; k < 4; ++k) {
    CHECK(c.lamb_dicke(0, k) * c.lamb_dicke(2, k) * sign02[k] > 0.0);
  }
}

TEST_CASE("centre of mass mode couples identically to every ion") {
  TrapConfig t;
  t.ion_count = 5;
  t.transverse_freq_hz = 5e6;
  const ChainModel c = build_chain(t);
  for (int j = 1; j < 5; ++j) {
    CHECK(c.lamb_dicke(j, 4) == doctest::Approx(c.lamb_dicke(0, 4)).epsilon(1e-12));
  }
  // Middle ion of an odd chain does not move in the antisymmetric mode.
  CHECK(std::abs(c.lamb_dicke(2, 3)) < 1e-12);
}

TEST_CASE("lamb_dicke_scale replaces the single-ion prefactor") {
  TrapConfig t;
  t.lamb_dicke_scale = 0.1;
  const ChainModel c = build_chain(t);
  // CM mode: b = 1/2 and nu = w_x.
  CHECK(c.lamb_dicke(0, 3) == doctest::Approx(0.05).epsilon(1e-12));
  const double ratio = std::sqrt(c.mode_freqs(3) / c.mode_freqs(0));
  CHECK(std::abs(c.lamb_dicke(1, 0)) ==
        doctest::Approx(0.1 * std::abs(c.mode_matrix(1, 0)) * ratio).epsilon(1e-12));

  t.lamb_dicke_scale = 0.8;
  CHECK_FALSE(build_chain(t).warnings.empty());
}

TEST_CASE("invalid traps are rejected") {
  TrapConfig t;
  t.ion_count = 0;
  CHECK_THROWS_AS(build_chain(t), ConfigError);

  t = TrapConfig{};
  t.axial_freq_hz = -1.0;
  CHECK_THROWS_AS(build_chain(t), ConfigError);

  // Weak transverse confinement buckles the chain.
  t = TrapConfig{};
  t.ion_count = 8;
  t.transverse_freq_hz = 1.5e6;
  CHECK_THROWS_AS(build_chain(t), Error);
}

}
