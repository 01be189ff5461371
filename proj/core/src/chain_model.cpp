#include "ionpulse/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

Eigen::VectorXd net_force(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd f = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == i) continue;
      const double d = u(i) - u(m);
      f(i) -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return f;
}

Eigen::MatrixXd force_jacobian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == i) continue;
      const double c = 2.0 / std::pow(std::abs(u(i) - u(m)), 3);
      jac(i, i) += c;
      jac(i, m) -= c;
    }
  }
  return jac;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    if (!(u(i) > u(i - 1))) return false;
  }
  return true;
}

}  // namespace

void TrapConfig::validate() const {
  if (ion_count < 1) throw ConfigError("trap.ion_count must be >= 1");
  if (!(ion_mass_kg > 0)) throw ConfigError("trap.ion_mass must be positive");
  if (!(axial_freq_hz > 0)) throw ConfigError("trap.axial_freq_hz must be positive");
  if (!(transverse_freq_hz > 0)) {
    throw ConfigError("trap.transverse_freq_hz must be positive");
  }
  if (!(wavevector_difference > 0)) {
    throw ConfigError("trap.wavevector_difference must be positive");
  }
  if (lamb_dicke_scale && !(*lamb_dicke_scale > 0)) {
    throw ConfigError("trap.lamb_dicke_scale must be positive");
  }
  if (ion_count > 1 && !(transverse_freq_hz > axial_freq_hz)) {
    throw ConfigError(
        "trap.transverse_freq_hz must exceed trap.axial_freq_hz for a linear chain");
  }
}

double TrapConfig::length_scale() const {
  const double wz = axial_angular();
  return std::cbrt(kElementaryCharge * kElementaryCharge /
                   (4.0 * kPi * kVacuumPermittivity * ion_mass_kg * wz * wz));
}

Eigen::VectorXd solve_equilibrium_dimensionless(int n, int max_iterations,
                                                double tolerance) {
  if (n < 1) throw ConfigError("ion count must be >= 1");
  if (n == 1) return Eigen::VectorXd::Zero(1);

  // Uniform guess; the damped iteration keeps the ordering.
  const double half_extent = 0.75 * (n - 1);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(n, -half_extent, half_extent);

  Eigen::VectorXd f = net_force(u);
  double residual = f.cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iterations && residual > tolerance; ++it) {
    const Eigen::VectorXd step = force_jacobian(u).partialPivLu().solve(-f);
    double damping = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, damping *= 0.5) {
      Eigen::VectorXd trial = u + damping * step;
      if (!strictly_increasing(trial)) continue;
      const Eigen::VectorXd ft = net_force(trial);
      const double rt = ft.cwiseAbs().maxCoeff();
      if (rt < residual || rt <= tolerance) {
        u = std::move(trial);
        f = ft;
        residual = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(residual <= tolerance)) {
    std::ostringstream msg;
    msg << "equilibrium solve for " << n
        << " ions did not converge: residual " << residual;
    throw SolverError(msg.str(), residual);
  }
  // Enforce exact mirror symmetry; the force balance is invariant under it.
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (u(n - 1 - i) - u(i));
    u(i) = -a;
    u(n - 1 - i) = a;
  }
  if (n % 2 == 1) u(n / 2) = 0.0;
  return u;
}

Eigen::VectorXd solve_equilibrium(const TrapConfig& config) {
  config.validate();
  return solve_equilibrium_dimensionless(config.ion_count) * config.length_scale();
}

NormalModes transverse_modes(const TrapConfig& config,
                             const Eigen::VectorXd& positions) {
  config.validate();
  const Eigen::Index n = positions.size();
  if (n != config.ion_count) {
    throw ConfigError("positions size does not match trap.ion_count");
  }
  const Eigen::VectorXd u = positions / config.length_scale();
  const double ratio = config.transverse_freq_hz / config.axial_freq_hz;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = ratio * ratio;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == i) continue;
      const double c = 1.0 / std::pow(std::abs(u(i) - u(m)), 3);
      a(i, i) -= c;
      a(i, m) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  const Eigen::VectorXd& lambda = solver.eigenvalues();

  NormalModes modes;
  modes.frequencies.resize(n);
  modes.vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(lambda(k) > 0)) {
      std::ostringstream msg;
      msg << "zigzag instability: transverse mode " << k
          << " has non-positive curvature " << lambda(k);
      throw InstabilityError(msg.str(), static_cast<std::size_t>(k));
    }
    modes.frequencies(k) = config.axial_angular() * std::sqrt(lambda(k));

    Eigen::Index largest = 0;
    modes.vectors.col(k).cwiseAbs().maxCoeff(&largest);
    // Mirror-symmetric modes have tied extreme entries; prefer the first.
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(std::abs(modes.vectors(j, k)) -
                   std::abs(modes.vectors(largest, k))) < 1e-9) {
        largest = j;
        break;
      }
    }
    if (modes.vectors(largest, k) < 0) modes.vectors.col(k) *= -1.0;
  }
  return modes;
}

LambDicke lamb_dicke_matrix(const TrapConfig& config, const NormalModes& modes) {
  const Eigen::Index n = modes.vectors.rows();
  const Eigen::Index m = modes.frequencies.size();
  LambDicke out;
  out.eta.resize(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double nu = modes.frequencies(k);
    double prefactor;
    if (config.lamb_dicke_scale) {
      prefactor = *config.lamb_dicke_scale * std::sqrt(config.transverse_angular() / nu);
    } else {
      prefactor = config.wavevector_difference *
                  std::sqrt(kHbar / (2.0 * config.ion_mass_kg * nu));
    }
    out.eta.col(k) = prefactor * modes.vectors.col(k);
  }
  const double largest = out.eta.cwiseAbs().maxCoeff();
  if (largest >= 0.3) {
    std::ostringstream msg;
    msg << "Lamb-Dicke parameter " << largest
        << " is outside the Lamb-Dicke regime (|eta| < 0.3)";
    out.warning = msg.str();
  }
  return out;
}

ChainModel build_chain(const TrapConfig& config) {
  ChainModel chain;
  chain.positions = solve_equilibrium(config);
  NormalModes modes = transverse_modes(config, chain.positions);
  LambDicke ld = lamb_dicke_matrix(config, modes);
  chain.mode_freqs = std::move(modes.frequencies);
  chain.mode_matrix = std::move(modes.vectors);
  chain.lamb_dicke = std::move(ld.eta);
  if (ld.warning) chain.warnings.push_back(*ld.warning);
  return chain;
}

}  // namespace ionpulse
