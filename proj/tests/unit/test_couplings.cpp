#include <doctest.h>

#include <complex>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/coupling_quadrature.hpp"
#include "ionpulse/errors.hpp"
#include "support.hpp"

using namespace ionpulse;
using cd = std::complex<double>;

namespace {

struct Case {
  ChainModel chain;
  DriveConfig drive;
  PulseSchedule schedule;
};

Case random_case(testing::Rng& rng, int segments) {
  TrapConfig t;
  t.ion_count = rng.integer(2, 4);
  Case c{build_chain(t), {}, {}};
  c.drive.detuning = to_angular(3.15e6);
  const int a = 0, b = t.ion_count - 1;
  c.schedule = testing::random_schedule(rng, segments, 100e-6, to_angular(rng.uniform(0.1e6, 2e6)),
                                        {a, b}, rng.uniform() < 0.5);
  return c;
}

}  // namespace

TEST_SUITE("couplings") {

TEST_CASE("silent pulse gives zero everywhere") {
  const ChainModel chain = build_chain(TrapConfig{});
  const DriveConfig drive{to_angular(3.15e6), 0.0};
  const PulseSchedule s = testing::constant_schedule(20, 1e-4, 0.0, {0, 2});
  const CouplingReport r = evaluate_couplings(s, chain, drive);
  CHECK(r.beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.beta_tilde.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.theta_total == 0.0);
  CHECK(r.theta_tilde_total == 0.0);
  CHECK(theta_until(s, chain, drive, 5e-5) == 0.0);
}

TEST_CASE("single segment closed forms") {
  Eigen::MatrixXd eta(2, 1);
  eta << 0.05, 0.03;
  const ChainModel chain = testing::synthetic_chain({3.0e6}, eta);
  const DriveConfig drive{to_angular(3.037e6), 0.0};
  const double tau = 1e-4, w = to_angular(20e3);
  const PulseSchedule s = testing::constant_schedule(1, tau, w);
  const CouplingReport r = evaluate_couplings(s, chain, drive);

  const double b = drive.detuning - chain.mode_freqs(0);
  const cd i{0.0, 1.0};
  const cd e = std::exp(i * b * tau);
  const cd beta = 0.05 * w * (e - 1.0) / (i * b);
  const cd beta_t = i * 0.05 * w * (tau * e / (i * b) - (e - 1.0) / ((i * b) * (i * b)));
  const double th = 0.05 * 0.03 * w * w * (tau / b - std::sin(b * tau) / (b * b));

  CHECK(std::abs(r.beta(0, 0) - beta) / std::abs(beta) < 1e-12);
  CHECK(std::abs(r.beta(1, 0) - beta * 0.6) / std::abs(beta) < 1e-12);
  CHECK(std::abs(r.beta_tilde(0, 0) - beta_t) / std::abs(beta_t) < 1e-10);
  CHECK(r.theta_pair[0] == doctest::Approx(th).epsilon(1e-11));
  CHECK(r.theta_pair[1] == doctest::Approx(th).epsilon(1e-11));
  CHECK(r.theta_total == doctest::Approx(2.0 * th).epsilon(1e-11));
}

TEST_CASE("closed phase-space loop") {
  Eigen::MatrixXd eta(2, 1);
  eta << 0.05, 0.05;
  const ChainModel chain = testing::synthetic_chain({3.0e6}, eta);
  const double tau = 1e-4;
  // B tau = 2 pi
  const DriveConfig drive{chain.mode_freqs(0) + kTwoPi / tau, 0.0};
  const CouplingReport r =
      evaluate_couplings(testing::constant_schedule(1, tau, to_angular(50e3)), chain, drive);
  CHECK(r.beta.cwiseAbs().maxCoeff() < 1e-12 * 0.05 * to_angular(50e3) * tau);
}

TEST_CASE("closed forms agree with quadrature") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    CAPTURE(trial);
    const Case c = random_case(rng, 4 + trial);
    const CouplingReport r = evaluate_couplings(c.schedule, c.chain, c.drive);
    CHECK(testing::rel_error(r.beta, beta_quadrature(c.schedule, c.chain, c.drive)) < 1e-10);
    CHECK(testing::rel_error(r.beta_tilde,
                             beta_tilde_quadrature(c.schedule, c.chain, c.drive)) < 1e-10);
    const ThetaQuadrature q = theta_quadrature(c.schedule, c.chain, c.drive);
    CHECK(testing::rel_error(r.theta_total, q.theta_total) < 1e-8);
    CHECK(testing::rel_error(r.theta_tilde_total, q.theta_tilde_total) < 1e-8);
  }
}

TEST_CASE("derivatives agree with finite differences over the drift") {
  testing::Rng rng(12);
  const double h = to_angular(10.0);
  for (int trial = 0; trial < 6; ++trial) {
    CAPTURE(trial);
    Case c = random_case(rng, 20);
    const CouplingReport r = evaluate_couplings(c.schedule, c.chain, c.drive);
    // Five-point stencil: a plain central difference at this step already
    // carries (h tau)^2 / 6 ~ 7e-6 truncation error for tau = 100 us.
    auto shifted = [&](double d) {
      DriveConfig out = c.drive;
      out.drift += d;
      return out;
    };
    const Eigen::MatrixXcd fd_beta =
        (8.0 * (beta_closed_form(c.schedule, c.chain, shifted(h)) -
                beta_closed_form(c.schedule, c.chain, shifted(-h))) -
         (beta_closed_form(c.schedule, c.chain, shifted(2 * h)) -
          beta_closed_form(c.schedule, c.chain, shifted(-2 * h)))) /
        (12.0 * h);
    auto th = [&](double d) { return theta(c.schedule, c.chain, shifted(d)); };
    const double fd_theta = (8.0 * (th(h) - th(-h)) - (th(2 * h) - th(-2 * h))) / (12.0 * h);
    CHECK(testing::rel_error(r.beta_tilde, fd_beta) < 1e-6);
    CHECK(testing::rel_error(r.theta_tilde_total, fd_theta) < 1e-6);
    CHECK(beta_tilde(c.schedule, c.chain, c.drive) == r.beta_tilde);
    CHECK(theta_tilde(c.schedule, c.chain, c.drive) == r.theta_tilde_total);
  }
}

TEST_CASE("amplitude and Lamb-Dicke scaling") {
  testing::Rng rng(13);
  Case c = random_case(rng, 10);
  const CouplingReport r1 = evaluate_couplings(c.schedule, c.chain, c.drive);
  PulseSchedule doubled = c.schedule;
  for (auto& a : doubled.amplitudes) {
    for (double& x : a) x *= 2.0;
  }
  const CouplingReport r2 = evaluate_couplings(doubled, c.chain, c.drive);
  CHECK(testing::rel_error(r2.beta, Eigen::MatrixXcd(2.0 * r1.beta)) < 1e-13);
  CHECK(r2.theta_total == doctest::Approx(4.0 * r1.theta_total).epsilon(1e-12));

  ChainModel half = c.chain;
  half.lamb_dicke *= 0.5;
  const CouplingReport r3 = evaluate_couplings(c.schedule, half, c.drive);
  CHECK(testing::rel_error(r3.beta, Eigen::MatrixXcd(0.5 * r1.beta)) < 1e-13);
  CHECK(r3.theta_total == doctest::Approx(0.25 * r1.theta_total).epsilon(1e-12));
}

TEST_CASE("partial-gate angle") {
  testing::Rng rng(14);
  const Case c = random_case(rng, 20);
  const double full = theta(c.schedule, c.chain, c.drive);
  CHECK(theta_until(c.schedule, c.chain, c.drive, 0.0) == 0.0);
  CHECK(std::abs(theta_until(c.schedule, c.chain, c.drive, c.schedule.duration) - full) <
        1e-12 * std::max(1.0, std::abs(full)));
  // At a segment boundary the partial angle is the angle of the truncated pulse.
  PulseSchedule head = c.schedule;
  head.segment_count = 5;
  head.duration = 5.0 * c.schedule.segment_duration();
  for (int s = 0; s < 2; ++s) {
    head.amplitudes[s].resize(5);
    head.phases[s].resize(5);
  }
  const double at5 = theta_until(c.schedule, c.chain, c.drive, head.duration);
  CHECK(at5 == doctest::Approx(theta(head, c.chain, c.drive)).epsilon(1e-10));
  CHECK_THROWS_AS(theta_until(c.schedule, c.chain, c.drive, -1e-9), DomainError);
}

TEST_CASE("kernel evaluation matches the free functions") {
  testing::Rng rng(15);
  const Case c = random_case(rng, 12);
  const CouplingKernel k(c.chain, c.drive, c.schedule.segment_count, c.schedule.duration,
                         c.schedule.addressed);
  const CouplingReport a = k.evaluate(CouplingKernel::weights_of(c.schedule));
  const CouplingReport b = evaluate_couplings(c.schedule, c.chain, c.drive);
  CHECK(testing::rel_error(a.beta, b.beta) < 1e-14);
  CHECK(a.theta_total == doctest::Approx(b.theta_total).epsilon(1e-13));
}

TEST_CASE("resonant sidebands are rejected") {
  const ChainModel chain = build_chain(TrapConfig{});
  DriveConfig drive{chain.mode_freqs(1) + to_angular(50.0), 0.0};
  const PulseSchedule s = testing::constant_schedule(20, 1e-4, 1e5, {0, 2});
  try {
    evaluate_couplings(s, chain, drive);
    FAIL("expected ResonanceError");
  } catch (const ResonanceError& e) {
    CHECK(e.mode() == 1);
  }
}

}
