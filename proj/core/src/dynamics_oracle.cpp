#include "ionpulse/dynamics_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

Eigen::MatrixXcd lowering(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// exp(-i K) for Hermitian K.
Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
  if (es.info() != Eigen::Success) throw OracleError("eigen-decomposition failed");
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, -l); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

void OracleConfig::validate() const {
  if (fock_cutoff < 2) throw ConfigError("oracle fock_cutoff must be >= 2");
  if (steps_per_cycle < 1 || min_steps_per_segment < 1) {
    throw ConfigError("oracle step counts must be positive");
  }
  if (!(thermal_weight_tolerance > 0.0 && thermal_weight_tolerance < 1.0)) {
    throw ConfigError("oracle thermal_weight_tolerance must lie in (0, 1)");
  }
}

std::size_t PropagatedGate::dimension() const {
  std::size_t d = 4;
  for (std::size_t m = 0; m < modes.size(); ++m) d *= static_cast<std::size_t>(fock_cutoff + 1);
  return d;
}

double PropagatedGate::factor_defect() const {
  double worst = 0.0;
  for (const auto& sector : factors) {
    for (const auto& u : sector) {
      const auto id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
      worst = std::max(worst, max_abs(u.adjoint() * u - id));
    }
  }
  return worst;
}

Eigen::MatrixXcd PropagatedGate::full_unitary(std::size_t cap) const {
  const std::size_t dim = dimension();
  if (dim > cap) {
    std::ostringstream msg;
    msg << "dense propagator of dimension " << dim << " exceeds the cap " << cap;
    throw OracleError(msg.str());
  }
  const auto sub = static_cast<Eigen::Index>(dim / 4);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (int s = 0; s < 4; ++s) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& f : factors[static_cast<std::size_t>(s)]) {
      Eigen::MatrixXcd next(block.rows() * f.rows(), block.cols() * f.cols());
      for (Eigen::Index i = 0; i < block.rows(); ++i) {
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
          next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = block(i, j) * f;
        }
      }
      block = std::move(next);
    }
    u.block(s * sub, s * sub, sub, sub) = block;
  }
  return u;
}

double PropagatedGate::unitarity_defect(std::size_t cap) const {
  if (dimension() > cap) return factor_defect();
  const Eigen::MatrixXcd u = full_unitary(cap);
  return max_abs(u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()));
}

PropagatedGate propagate(const PulseSchedule& schedule, const ChainModel& chain,
                         const DriveConfig& drive, const OracleConfig& config) {
  config.validate();
  for (int s = 0; s < 2; ++s) {
    if (schedule.addressed[s] < 0 || schedule.addressed[s] >= chain.ion_count()) {
      throw ConfigError("addressed ion index outside the chain");
    }
  }
  std::vector<int> modes = config.modes;
  if (modes.empty()) {
    for (int k = 0; k < chain.mode_count(); ++k) modes.push_back(k);
  }
  for (int k : modes) {
    if (k < 0 || k >= chain.mode_count()) throw ConfigError("oracle mode index out of range");
  }

  PropagatedGate gate;
  gate.fock_cutoff = config.fock_cutoff;
  gate.modes = modes;
  const std::size_t dim = gate.dimension();
  // Guard against overflow as well as size.
  double log_dim = std::log(4.0) + modes.size() * std::log(config.fock_cutoff + 1.0);
  if (dim > config.dimension_cap || log_dim > std::log(1e18)) {
    std::ostringstream msg;
    msg << "oracle Hilbert dimension " << dim << " exceeds the cap "
        << config.dimension_cap;
    throw OracleError(msg.str());
  }

  const int d = config.fock_cutoff + 1;
  const Eigen::MatrixXcd a = lowering(d);
  const Eigen::MatrixXcd ad = a.adjoint();
  const double h = schedule.segment_duration();
  const double g1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double g2 = 0.5 + std::sqrt(3.0) / 6.0;

  Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(d);
  vacuum(0) = 1.0;

  for (int sector = 0; sector < 4; ++sector) {
    for (int k : modes) {
      const double b = drive.detuning - chain.mode_freqs(k) + drive.drift;
      Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
      for (int l = 0; l < schedule.segment_count; ++l) {
        cd g = 0.0;
        for (int s = 0; s < 2; ++s) {
          g += static_cast<double>(sector_sign(sector, s)) *
               chain.lamb_dicke(schedule.addressed[s], k) * schedule.weight(s, l);
        }
        // Fastest phase rate on this segment: the sideband rotation and the
        // coupling strength at the top of the truncated ladder.
        const double rate = std::abs(b) + 2.0 * std::abs(g) * std::sqrt(double(d));
        const int steps = std::max(config.min_steps_per_segment,
                                   static_cast<int>(std::ceil(rate * h * config.steps_per_cycle / kTwoPi)));
        const double dt = h / steps;
        for (int q = 0; q < steps; ++q) {
          const double t0 = l * h + q * dt;
          // H(t) = i f a - i f^* a^dag with f = g e^{iBt}.
          auto hamiltonian = [&](double t) -> Eigen::MatrixXcd {
            const cd f = g * std::polar(1.0, b * t);
            return kI * f * a - kI * std::conj(f) * ad;
          };
          const Eigen::MatrixXcd h1 = hamiltonian(t0 + g1 * dt);
          const Eigen::MatrixXcd h2 = hamiltonian(t0 + g2 * dt);
          // Omega_4 = -i dt/2 (H1 + H2) - sqrt(3)/12 dt^2 [H2, H1]; write
          // Omega_4 = -i K with K Hermitian.
          const Eigen::MatrixXcd comm = h2 * h1 - h1 * h2;
          Eigen::MatrixXcd kmat = 0.5 * dt * (h1 + h2) - kI * (std::sqrt(3.0) / 12.0) * dt * dt * comm;
          kmat = 0.5 * (kmat + kmat.adjoint()).eval();
          u = hermitian_exp(kmat) * u;
        }
      }
      if (!u.allFinite()) throw OracleError("propagation produced non-finite values");
      const Eigen::VectorXcd out = u * vacuum;
      gate.leakage = std::max(gate.leakage, std::norm(out(d - 1)));
      gate.factors[static_cast<std::size_t>(sector)].push_back(std::move(u));
    }
  }
  return gate;
}

OracleFidelity gate_fidelity_exact(const PropagatedGate& gate, const ThermalEnv& env,
                                   const OracleConfig& config) {
  config.validate();
  OracleFidelity out;
  cd overlap = 0.0;
  // Thermal Fock weights per included mode, truncated once the kept weight
  // exceeds 1 - tolerance.
  std::vector<std::vector<double>> weights;
  for (int k : gate.modes) {
    const double nbar = k < env.occupations.size() ? env.occupations(k) : 0.0;
    std::vector<double> w;
    double kept = 0.0;
    const double ratio = nbar / (1.0 + nbar);
    double p = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= gate.fock_cutoff; ++n) {
      w.push_back(p);
      kept += p;
      if (kept > 1.0 - config.thermal_weight_tolerance) break;
      p *= ratio;
    }
    out.thermal_weight *= kept;
    weights.push_back(std::move(w));
  }
  for (int sector = 0; sector < 4; ++sector) {
    const double ss = sector_sign(sector, 0) * sector_sign(sector, 1);
    cd term = std::polar(1.0, kPi / 4.0 * ss);  // <s| U_g^dag |s>
    const auto& fs = gate.factors[static_cast<std::size_t>(sector)];
    for (std::size_t m = 0; m < fs.size(); ++m) {
      cd avg = 0.0;
      for (std::size_t n = 0; n < weights[m].size(); ++n) {
        avg += weights[m][n] * fs[m](static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      }
      term *= avg;
    }
    overlap += term;
  }
  overlap /= 4.0;
  out.overlap = std::abs(overlap);
  out.fidelity = out.overlap * out.overlap;
  return out;
}

}  // namespace ionpulse
