#include "ionpulse/coupling_integrals.hpp"

#include <cmath>
#include <sstream>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// phi_k(z) = sum_n z^n / (n + k)!, evaluated at z = i x.
struct Phi {
  cd p1, p2, p3;
};

Phi phi_functions(double x) {
  const cd z{0.0, x};
  Phi out;
  if (std::abs(x) < 1.0) {
    cd term1 = 1.0, term2 = 0.5, term3 = 1.0 / 6.0;
    out.p1 = out.p2 = out.p3 = 0.0;
    for (int n = 0; n < 40; ++n) {
      out.p1 += term1;
      out.p2 += term2;
      out.p3 += term3;
      term1 *= z / static_cast<double>(n + 2);
      term2 *= z / static_cast<double>(n + 3);
      term3 *= z / static_cast<double>(n + 4);
      if (std::abs(term1) < 1e-18) break;
    }
    return out;
  }
  const double half = std::sin(0.5 * x);
  const cd expm1{-2.0 * half * half, std::sin(x)};  // e^{ix} - 1
  out.p1 = expm1 / z;
  out.p2 = (out.p1 - 1.0) / z;
  out.p3 = (out.p2 - 0.5) / z;
  return out;
}

// Closed-form integrals of one segment [start, start + h] for sideband b.
struct SegmentTerms {
  cd e;      // int e^{ibt} dt
  cd de;     // d e / db = i int t e^{ibt} dt
  cd diag;   // int_{t2 < t1 in segment} e^{ib(t1 - t2)}
  cd ddiag;  // d diag / db
};

SegmentTerms segment_terms(double b, double start, double h) {
  const Phi phi = phi_functions(b * h);
  const cd rot = std::polar(1.0, b * start);
  SegmentTerms t;
  t.e = rot * h * phi.p1;
  t.de = kI * rot * (start * h * phi.p1 + h * h * (phi.p1 - phi.p2));
  t.diag = h * h * phi.p2;
  t.ddiag = kI * h * h * h * (phi.p2 - 2.0 * phi.p3);
  return t;
}

struct Segment {
  double start;
  double length;
  cd c[2];
};

struct ModeSums {
  cd beta[2]{};
  cd beta_tilde[2]{};
  double theta[2]{};        // ordered (0,1) and (1,0), per unit eta product
  double theta_tilde[2]{};
};

// O(L) accumulation of all closed forms for one mode.
ModeSums accumulate(const std::vector<Segment>& segs, double b) {
  ModeSums out;
  cd prefix[2]{}, dprefix[2]{};  // running beta, beta_tilde (unit eta)
  cd theta_acc[2]{}, dtheta_acc[2]{};
  for (const Segment& seg : segs) {
    const SegmentTerms t = segment_terms(b, seg.start, seg.length);
    for (int a = 0; a < 2; ++a) {
      const int o = 1 - a;
      const cd ca = seg.c[a];
      const cd cross = ca * std::conj(seg.c[o]);
      theta_acc[a] += cross * t.diag + ca * t.e * std::conj(prefix[o]);
      dtheta_acc[a] += cross * t.ddiag + ca * t.de * std::conj(prefix[o]) +
                       ca * t.e * std::conj(dprefix[o]);
    }
    for (int s = 0; s < 2; ++s) {
      prefix[s] += seg.c[s] * t.e;
      dprefix[s] += seg.c[s] * t.de;
    }
  }
  for (int s = 0; s < 2; ++s) {
    out.beta[s] = prefix[s];
    out.beta_tilde[s] = dprefix[s];
    out.theta[s] = theta_acc[s].imag();
    out.theta_tilde[s] = dtheta_acc[s].imag();
  }
  return out;
}

std::vector<Segment> uniform_segments(const PulseSchedule& schedule, double until) {
  std::vector<Segment> segs;
  const double h = schedule.segment_duration();
  for (int l = 0; l < schedule.segment_count; ++l) {
    const double start = l * h;
    if (start >= until) break;
    const double length = std::min(h, until - start);
    segs.push_back({start, length, {schedule.weight(0, l), schedule.weight(1, l)}});
  }
  return segs;
}

void check_schedule(const PulseSchedule& schedule, const ChainModel& chain) {
  if (schedule.segment_count < 1 || !(schedule.duration > 0)) {
    throw ConfigError("pulse schedule is empty");
  }
  for (int s = 0; s < 2; ++s) {
    if (schedule.addressed[s] < 0 || schedule.addressed[s] >= chain.ion_count()) {
      throw ConfigError("addressed ion index outside the chain");
    }
    if (static_cast<int>(schedule.amplitudes[s].size()) != schedule.segment_count ||
        static_cast<int>(schedule.phases[s].size()) != schedule.segment_count) {
      throw ConfigError("pulse segment arrays do not match segment_count");
    }
  }
}

CouplingReport evaluate_segments(const std::vector<Segment>& segs,
                                 const ChainModel& chain, const DriveConfig& drive,
                                 std::array<int, 2> addressed) {
  const Eigen::VectorXd b = sideband_freqs(chain, drive);
  const int modes = static_cast<int>(b.size());
  CouplingReport rep;
  rep.beta.resize(2, modes);
  rep.beta_tilde.resize(2, modes);
  for (int k = 0; k < modes; ++k) {
    const ModeSums m = accumulate(segs, b(k));
    const double eta_a = chain.lamb_dicke(addressed[0], k);
    const double eta_b = chain.lamb_dicke(addressed[1], k);
    const double w = eta_a * eta_b;
    rep.beta(0, k) = eta_a * m.beta[0];
    rep.beta(1, k) = eta_b * m.beta[1];
    rep.beta_tilde(0, k) = eta_a * m.beta_tilde[0];
    rep.beta_tilde(1, k) = eta_b * m.beta_tilde[1];
    for (int p = 0; p < 2; ++p) {
      rep.theta_pair[p] += w * m.theta[p];
      rep.theta_tilde_pair[p] += w * m.theta_tilde[p];
    }
  }
  rep.theta_total = rep.theta_pair[0] + rep.theta_pair[1];
  rep.theta_tilde_total = rep.theta_tilde_pair[0] + rep.theta_tilde_pair[1];
  return rep;
}

}  // namespace

Eigen::VectorXd sideband_freqs(const ChainModel& chain, const DriveConfig& drive) {
  Eigen::VectorXd b(chain.mode_count());
  for (int k = 0; k < chain.mode_count(); ++k) {
    b(k) = drive.detuning - chain.mode_freqs(k) + drive.drift;
    if (!(std::abs(b(k)) >= kResonanceThreshold)) {
      std::ostringstream msg;
      msg << "mode " << k << " is resonant: |B_k| / 2pi = "
          << std::abs(b(k)) / kTwoPi << " Hz is below "
          << kResonanceThreshold / kTwoPi << " Hz";
      throw ResonanceError(msg.str(), static_cast<std::size_t>(k));
    }
  }
  return b;
}

CouplingReport evaluate_couplings(const PulseSchedule& schedule,
                                  const ChainModel& chain,
                                  const DriveConfig& drive) {
  check_schedule(schedule, chain);
  return evaluate_segments(uniform_segments(schedule, schedule.duration), chain,
                           drive, schedule.addressed);
}

Eigen::MatrixXcd beta_closed_form(const PulseSchedule& schedule,
                                  const ChainModel& chain,
                                  const DriveConfig& drive) {
  check_schedule(schedule, chain);
  const Eigen::VectorXd b = sideband_freqs(chain, drive);
  const double h = schedule.segment_duration();
  Eigen::MatrixXcd beta = Eigen::MatrixXcd::Zero(2, b.size());
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    // -i S e^{i B l h} (1 - e^{-i B h}) / B, with l counted from 1.
    const cd loop = (1.0 - std::polar(1.0, -b(k) * h)) / b(k);
    for (int s = 0; s < 2; ++s) {
      cd sum = 0.0;
      for (int l = 0; l < schedule.segment_count; ++l) {
        sum += schedule.weight(s, l) * std::polar(1.0, b(k) * (l + 1) * h);
      }
      beta(s, k) = -kI * chain.lamb_dicke(schedule.addressed[s], k) * sum * loop;
    }
  }
  return beta;
}

Eigen::MatrixXcd beta_tilde(const PulseSchedule& schedule, const ChainModel& chain,
                            const DriveConfig& drive) {
  return evaluate_couplings(schedule, chain, drive).beta_tilde;
}

double theta(const PulseSchedule& schedule, const ChainModel& chain,
             const DriveConfig& drive) {
  return evaluate_couplings(schedule, chain, drive).theta_total;
}

double theta_tilde(const PulseSchedule& schedule, const ChainModel& chain,
                   const DriveConfig& drive) {
  return evaluate_couplings(schedule, chain, drive).theta_tilde_total;
}

double theta_until(const PulseSchedule& schedule, const ChainModel& chain,
                   const DriveConfig& drive, double t) {
  check_schedule(schedule, chain);
  if (!(t >= 0.0 && t <= schedule.duration)) {
    throw DomainError("theta_until: time outside [0, tau]");
  }
  if (t == 0.0) return 0.0;
  return evaluate_segments(uniform_segments(schedule, t), chain, drive,
                           schedule.addressed)
      .theta_total;
}

CouplingKernel::CouplingKernel(const ChainModel& chain, const DriveConfig& drive,
                               int segment_count, double duration,
                               std::array<int, 2> addressed)
    : segments_(segment_count), sideband_(sideband_freqs(chain, drive)) {
  if (segment_count < 1 || !(duration > 0)) {
    throw ConfigError("coupling kernel needs a non-empty pulse");
  }
  const int modes = static_cast<int>(sideband_.size());
  const double h = duration / segment_count;
  eta_.resize(2, modes);
  e_.resize(modes, segment_count);
  de_.resize(modes, segment_count);
  k_ = Eigen::MatrixXcd::Zero(segment_count, segment_count);
  dk_ = Eigen::MatrixXcd::Zero(segment_count, segment_count);
  for (int k = 0; k < modes; ++k) {
    for (int s = 0; s < 2; ++s) eta_(s, k) = chain.lamb_dicke(addressed[s], k);
    const double w = eta_(0, k) * eta_(1, k);
    for (int l = 0; l < segment_count; ++l) {
      const SegmentTerms t = segment_terms(sideband_(k), l * h, h);
      e_(k, l) = t.e;
      de_(k, l) = t.de;
      k_(l, l) += w * t.diag;
      dk_(l, l) += w * t.ddiag;
    }
    for (int l = 1; l < segment_count; ++l) {
      for (int m = 0; m < l; ++m) {
        k_(l, m) += w * e_(k, l) * std::conj(e_(k, m));
        dk_(l, m) += w * (de_(k, l) * std::conj(e_(k, m)) +
                          e_(k, l) * std::conj(de_(k, m)));
      }
    }
  }
}

CouplingKernel::Weights CouplingKernel::weights_of(const PulseSchedule& schedule) {
  Weights c;
  for (int s = 0; s < 2; ++s) {
    c[s].resize(schedule.segment_count);
    for (int l = 0; l < schedule.segment_count; ++l) c[s](l) = schedule.weight(s, l);
  }
  return c;
}

CouplingReport CouplingKernel::evaluate(const Weights& c) const {
  CouplingReport rep;
  const Eigen::VectorXcd b0 = e_ * c[0];
  const Eigen::VectorXcd b1 = e_ * c[1];
  const Eigen::VectorXcd bt0 = de_ * c[0];
  const Eigen::VectorXcd bt1 = de_ * c[1];
  rep.beta.resize(2, mode_count());
  rep.beta_tilde.resize(2, mode_count());
  rep.beta.row(0) = (eta_.row(0).transpose().cast<cd>().cwiseProduct(b0)).transpose();
  rep.beta.row(1) = (eta_.row(1).transpose().cast<cd>().cwiseProduct(b1)).transpose();
  rep.beta_tilde.row(0) =
      (eta_.row(0).transpose().cast<cd>().cwiseProduct(bt0)).transpose();
  rep.beta_tilde.row(1) =
      (eta_.row(1).transpose().cast<cd>().cwiseProduct(bt1)).transpose();
  for (int p = 0; p < 2; ++p) {
    const Eigen::VectorXcd& ca = c[p];
    const Eigen::VectorXcd& cb = c[1 - p];
    rep.theta_pair[p] = (ca.transpose() * k_ * cb.conjugate()).value().imag();
    rep.theta_tilde_pair[p] = (ca.transpose() * dk_ * cb.conjugate()).value().imag();
  }
  rep.theta_total = rep.theta_pair[0] + rep.theta_pair[1];
  rep.theta_tilde_total = rep.theta_tilde_pair[0] + rep.theta_tilde_pair[1];
  return rep;
}

}  // namespace ionpulse
