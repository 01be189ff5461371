#include "ionpulse/coupling_quadrature.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ionpulse/constants.hpp"
#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using cd = std::complex<double>;
constexpr int kLegendreOrder = 15;

struct Rule {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

const Rule& legendre_rule() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, kLegendreOrder>;
    Rule r;
    const auto& xs = G::abscissa();
    const auto& ws = G::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      r.x.push_back(xs[i]);
      r.w.push_back(ws[i]);
      if (xs[i] != 0.0) {
        r.x.push_back(-xs[i]);
        r.w.push_back(ws[i]);
      }
    }
    return r;
  }();
  return rule;
}

// Complex drive envelope Omega e^{i phi} on slot s, sampled at t.
cd envelope(const PulseSchedule& schedule, int s, double t) {
  const PulseSample v = sample(schedule, t);
  return std::polar(v.amplitude[s], v.phase[s]);
}

template <class F>
cd kronrod(F&& f, double a, double b, double tolerance) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_re = 0.0, err_im = 0.0, l1_re = 0.0, l1_im = 0.0;
  const double re = GK::integrate([&](double t) { return f(t).real(); }, a, b, 15,
                                  tolerance, &err_re, &l1_re);
  const double im = GK::integrate([&](double t) { return f(t).imag(); }, a, b, 15,
                                  tolerance, &err_im, &l1_im);
  // Error is judged against the size of the integrand, since oscillatory
  // panels can cancel to far below it.
  const double scale = std::max(l1_re + l1_im, 1e-300);
  if (err_re + err_im > 100 * tolerance * scale) {
    throw QuadratureError("Gauss-Kronrod quadrature did not reach tolerance");
  }
  return {re, im};
}

Eigen::MatrixXcd beta_like(const PulseSchedule& schedule, const ChainModel& chain,
                           const DriveConfig& drive, double tolerance,
                           bool weighted_by_time) {
  const Eigen::VectorXd b = sideband_freqs(chain, drive);
  const double h = schedule.segment_duration();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2, b.size());
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    for (int s = 0; s < 2; ++s) {
      cd total = 0.0;
      for (int l = 0; l < schedule.segment_count; ++l) {
        const double a = l * h;
        const double e = (l + 1 == schedule.segment_count) ? schedule.duration
                                                           : (l + 1) * h;
        // Sample strictly inside the panel so the segment lookup is exact.
        const double mid = 0.5 * (a + e);
        const cd g = envelope(schedule, s, mid);
        auto integrand = [&](double t) {
          const cd v = g * std::polar(1.0, b(k) * t);
          return weighted_by_time ? cd(0.0, 1.0) * t * v : v;
        };
        // Panels of at most pi radians of the sideband phase, each mapped to
        // the unit interval so the tolerance is relative.
        const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(b(k)) * (e - a) / kPi)));
        const double w = (e - a) / sub;
        for (int q = 0; q < sub; ++q) {
          const double p0 = a + q * w;
          auto unit = [&](double u) { return integrand(p0 + u * w) * w; };
          total += kronrod(unit, 0.0, 1.0, tolerance);
        }
      }
      out(s, k) = chain.lamb_dicke(schedule.addressed[s], k) * total;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd beta_quadrature(const PulseSchedule& schedule,
                                 const ChainModel& chain, const DriveConfig& drive,
                                 double tolerance) {
  return beta_like(schedule, chain, drive, tolerance, false);
}

Eigen::MatrixXcd beta_tilde_quadrature(const PulseSchedule& schedule,
                                       const ChainModel& chain,
                                       const DriveConfig& drive, double tolerance) {
  return beta_like(schedule, chain, drive, tolerance, true);
}

ThetaQuadrature theta_quadrature(const PulseSchedule& schedule,
                                 const ChainModel& chain, const DriveConfig& drive,
                                 double max_phase) {
  const Eigen::VectorXd b = sideband_freqs(chain, drive);
  const Rule& rule = legendre_rule();
  const double h = schedule.segment_duration();
  const double fastest = b.cwiseAbs().maxCoeff();
  const int sub = std::max(1, static_cast<int>(std::ceil(fastest * h / max_phase)));

  struct Panel {
    double a, e;
    cd g[2];
  };
  std::vector<Panel> panels;
  for (int l = 0; l < schedule.segment_count; ++l) {
    const double mid = (l + 0.5) * h;
    const cd g0 = envelope(schedule, 0, mid);
    const cd g1 = envelope(schedule, 1, mid);
    for (int q = 0; q < sub; ++q) {
      const double a = l * h + q * h / sub;
      panels.push_back({a, a + h / sub, {g0, g1}});
    }
  }

  ThetaQuadrature out;
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    const double w = chain.lamb_dicke(schedule.addressed[0], k) *
                     chain.lamb_dicke(schedule.addressed[1], k);
    const double bk = b(k);
    auto f = [&](int s, const Panel& p, double t) {
      return p.g[s] * std::polar(1.0, bk * t);
    };
    for (int pair = 0; pair < 2; ++pair) {
      const int first = pair;       // ion driven at the later time t1
      const int second = 1 - pair;  // ion driven at the earlier time t2
      // Running sums over completed panels of conj(f) and t conj(f).
      cd done = 0.0, done_t = 0.0;
      double th = 0.0, tht = 0.0;
      for (const Panel& p : panels) {
        const double half = 0.5 * (p.e - p.a);
        const double centre = 0.5 * (p.e + p.a);
        cd panel_sum = 0.0, panel_sum_t = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double t1 = centre + half * rule.x[i];
          const double w1 = half * rule.w[i];
          const cd f1 = f(first, p, t1);
          // Kernel sin(B(t1 - t2) + phi(t1) - phi(t2)) Omega Omega
          //   = Im(f1 conj(f2)); cos(...)(t1 - t2) = Re(f1 conj(f2)) (t1 - t2).
          cd inner = done, inner_t = done_t;
          const double ih = 0.5 * (t1 - p.a);
          const double ic = 0.5 * (t1 + p.a);
          for (std::size_t j = 0; j < rule.x.size(); ++j) {
            const double t2 = ic + ih * rule.x[j];
            const cd f2 = std::conj(f(second, p, t2)) * (ih * rule.w[j]);
            inner += f2;
            inner_t += t2 * f2;
          }
          th += w1 * (f1 * inner).imag();
          tht += w1 * (t1 * f1 * inner - f1 * inner_t).real();
          const cd f2 = std::conj(f(second, p, t1)) * w1;
          panel_sum += f2;
          panel_sum_t += t1 * f2;
        }
        done += panel_sum;
        done_t += panel_sum_t;
      }
      out.theta_total += w * th;
      out.theta_tilde_total += w * tht;
    }
  }
  return out;
}

}  // namespace ionpulse
