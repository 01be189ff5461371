#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/constants.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) {
    return a + (b - a) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

// Chain assembled directly from mode frequencies (Hz) and Lamb-Dicke factors.
inline ChainModel synthetic_chain(const std::vector<double>& freqs_hz,
                                  const Eigen::MatrixXd& eta) {
  ChainModel c;
  const auto n = static_cast<Eigen::Index>(freqs_hz.size());
  c.positions = Eigen::VectorXd::LinSpaced(eta.rows(), 0.0, 1.0);
  c.mode_freqs.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) c.mode_freqs(k) = to_angular(freqs_hz[k]);
  c.mode_matrix = eta / 0.05;
  c.lamb_dicke = eta;
  return c;
}

inline PulseSchedule random_schedule(Rng& rng, int segments, double duration,
                                     double omega_max, std::array<int, 2> addressed,
                                     bool shared) {
  PulseSchedule s;
  s.duration = duration;
  s.segment_count = segments;
  s.addressed = addressed;
  s.shared = shared;
  for (int slot = 0; slot < 2; ++slot) {
    s.amplitudes[slot].resize(segments);
    s.phases[slot].resize(segments);
  }
  for (int l = 0; l < segments; ++l) {
    for (int slot = 0; slot < 2; ++slot) {
      if (shared && slot == 1) {
        s.amplitudes[1][l] = s.amplitudes[0][l];
        s.phases[1][l] = s.phases[0][l];
        continue;
      }
      s.amplitudes[slot][l] = rng.uniform(0.0, omega_max);
      s.phases[slot][l] = rng.uniform(-kPi, kPi);
    }
  }
  return s;
}

inline PulseSchedule constant_schedule(int segments, double duration, double omega,
                                       std::array<int, 2> addressed = {0, 1}) {
  PulseSchedule s;
  s.duration = duration;
  s.segment_count = segments;
  s.addressed = addressed;
  for (int slot = 0; slot < 2; ++slot) {
    s.amplitudes[slot].assign(segments, omega);
    s.phases[slot].assign(segments, 0.0);
  }
  return s;
}

// max |a - b| / max(max |b|, floor)
template <class A, class B>
double rel_error(const A& a, const B& b, double floor = 1e-300) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

inline double rel_error(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace ionpulse::testing
