#include "ionpulse/cost.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

double smooth_abs(double x, double eps) { return std::sqrt(x * x + eps * eps); }
double smooth_sign(double x, double eps) { return x / smooth_abs(x, eps); }

}  // namespace

std::string to_string(CostVariant v) {
  switch (v) {
    case CostVariant::kNormal: return "normal";
    case CostVariant::kBetaRobust: return "beta_robust";
    case CostVariant::kFullyRobust: return "fully_robust";
  }
  return "unknown";
}

CostVariant parse_cost_variant(const std::string& name) {
  if (name == "normal") return CostVariant::kNormal;
  if (name == "beta" || name == "beta_robust") return CostVariant::kBetaRobust;
  if (name == "full" || name == "fully_robust") return CostVariant::kFullyRobust;
  throw ConfigError("unknown cost variant '" + name +
                    "' (expected normal, beta or full)");
}

void CostSpec::validate() const {
  const double w[] = {weights.beta, weights.beta_tilde, weights.theta,
                      weights.theta_tilde};
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError("cost weights must be finite and non-negative");
    }
  }
  if (!(epsilon > 0.0)) throw ConfigError("cost epsilon must be positive");
  if (!(tilde_rate > 0.0)) throw ConfigError("cost tilde_rate must be positive");
  if (!std::isfinite(target_angle)) throw ConfigError("target angle must be finite");
}

// Primitive quantities and their derivatives with respect to the free
// parameters. Row layout:
//   [0, 4N)      Re/Im beta_{s,k}, s-major
//   [4N, 8N)     Re/Im beta~_{s,k}
//   8N           theta_total
//   8N + 1, +2   theta~ of each ordered pair
struct CostFunction::Partials {
  CouplingReport report;
  Eigen::VectorXd q;
  Eigen::MatrixXd dq;  // empty unless requested
};

CostFunction::CostFunction(PulseLayout layout, const ChainModel& chain,
                           const DriveConfig& drive, CostSpec spec)
    : layout_(std::move(layout)),
      spec_(spec),
      kernel_(chain, drive, layout_.segment_count(), layout_.duration(),
              layout_.addressed()) {
  spec_.validate();
  for (int s = 0; s < 2; ++s) {
    if (layout_.addressed()[s] < 0 || layout_.addressed()[s] >= chain.ion_count()) {
      throw ConfigError("addressed ion index outside the chain");
    }
  }
}

CouplingReport CostFunction::couplings(const std::vector<double>& x) const {
  if (x.size() != layout_.size()) {
    throw ParameterError("parameter vector does not match the layout",
                         std::min(x.size(), layout_.size()));
  }
  PulseSchedule schedule = layout_.empty_schedule();
  layout_.expand(x, schedule);
  return kernel_.evaluate(CouplingKernel::weights_of(schedule));
}

CostFunction::Partials CostFunction::partials(const std::vector<double>& x) const {
  if (x.size() != layout_.size()) {
    throw ParameterError("parameter vector does not match the layout",
                         std::min(x.size(), layout_.size()));
  }
  PulseSchedule schedule = layout_.empty_schedule();
  layout_.expand(x, schedule);
  const CouplingKernel::Weights c = CouplingKernel::weights_of(schedule);

  Partials p;
  p.report = kernel_.evaluate(c);
  const int n = kernel_.mode_count();
  const int rows = 8 * n + 3;
  p.q.resize(rows);
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < n; ++k) {
      const int r = 2 * (s * n + k);
      p.q(r) = p.report.beta(s, k).real();
      p.q(r + 1) = p.report.beta(s, k).imag();
      p.q(4 * n + r) = p.report.beta_tilde(s, k).real();
      p.q(4 * n + r + 1) = p.report.beta_tilde(s, k).imag();
    }
  }
  p.q(8 * n) = p.report.theta_total;
  p.q(8 * n + 1) = p.report.theta_tilde_pair[0];
  p.q(8 * n + 2) = p.report.theta_tilde_pair[1];

  const Eigen::MatrixXcd& e = kernel_.segment_integral();
  const Eigen::MatrixXcd& de = kernel_.segment_integral_db();
  const Eigen::MatrixXcd& kk = kernel_.theta_kernel();
  const Eigen::MatrixXcd& dk = kernel_.theta_tilde_kernel();
  const Eigen::MatrixXd& eta = kernel_.eta();

  // theta_p = Im(c_p^T K conj(c_q)), q = 1 - p. Derivative with respect to
  // c_p[l] goes through u_p = K conj(c_q); with respect to c_q[l] through
  // v_p = K^T c_p (entering conjugated).
  Eigen::VectorXcd u[2], v[2], du[2], dv[2];
  for (int pr = 0; pr < 2; ++pr) {
    u[pr] = kk * c[1 - pr].conjugate();
    v[pr] = kk.transpose() * c[pr];
    du[pr] = dk * c[1 - pr].conjugate();
    dv[pr] = dk.transpose() * c[pr];
  }

  p.dq = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(x.size()));
  auto add = [&](Eigen::Index col, int s, int l, cd dc) {
    for (int k = 0; k < n; ++k) {
      const int r = 2 * (s * n + k);
      const cd db = eta(s, k) * e(k, l) * dc;
      const cd dbt = eta(s, k) * de(k, l) * dc;
      p.dq(r, col) += db.real();
      p.dq(r + 1, col) += db.imag();
      p.dq(4 * n + r, col) += dbt.real();
      p.dq(4 * n + r + 1, col) += dbt.imag();
    }
    for (int pr = 0; pr < 2; ++pr) {
      double dth = 0.0, dtt = 0.0;
      if (s == pr) {
        dth += (dc * u[pr](l)).imag();
        dtt += (dc * du[pr](l)).imag();
      }
      if (s == 1 - pr) {
        dth += (v[pr](l) * std::conj(dc)).imag();
        dtt += (dv[pr](l) * std::conj(dc)).imag();
      }
      p.dq(8 * n, col) += dth;
      p.dq(8 * n + 1 + pr, col) += dtt;
    }
  };

  const auto& slots = layout_.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const ParamSlot& slot = slots[i];
    const auto col = static_cast<Eigen::Index>(i);
    for (int s : slot.ion_slots) {
      if (slot.kind == SlotKind::kAmplitude) {
        add(col, s, slot.segment, std::polar(1.0, schedule.phases[s][slot.segment]));
        if (slot.mirror_segment >= 0) {
          const int m = slot.mirror_segment;
          add(col, s, m, std::polar(1.0, schedule.phases[s][m]));
        }
      } else {
        add(col, s, slot.segment, kI * c[s](slot.segment));
        if (slot.mirror_segment >= 0) {
          add(col, s, slot.mirror_segment, -kI * c[s](slot.mirror_segment));
        }
      }
    }
  }
  return p;
}

CostValue CostFunction::evaluate(const std::vector<double>& x) const {
  const CouplingReport rep = couplings(x);
  const CostWeights& w = spec_.weights;
  const double r = spec_.tilde_rate;
  CostValue out;
  out.groups.beta = w.beta * rep.beta.cwiseAbs2().sum();
  out.groups.beta_tilde = w.beta_tilde * r * r * rep.beta_tilde.cwiseAbs2().sum();
  out.groups.theta =
      w.theta * smooth_abs(rep.theta_total - spec_.target_angle, spec_.epsilon);
  out.groups.theta_tilde =
      w.theta_tilde * (smooth_abs(r * rep.theta_tilde_pair[0], spec_.epsilon) +
                       smooth_abs(r * rep.theta_tilde_pair[1], spec_.epsilon));
  out.total = out.groups.beta + out.groups.theta;
  if (spec_.uses_beta_tilde()) out.total += out.groups.beta_tilde;
  if (spec_.uses_theta_tilde()) out.total += out.groups.theta_tilde;
  return out;
}

std::vector<double> CostFunction::gradient(const std::vector<double>& x) const {
  const Partials p = partials(x);
  const int n = kernel_.mode_count();
  const CostWeights& w = spec_.weights;
  const double r = spec_.tilde_rate;
  const double eps = spec_.epsilon;

  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(p.q.size());
  coeff.segment(0, 4 * n) = 2.0 * w.beta * p.q.segment(0, 4 * n);
  if (spec_.uses_beta_tilde()) {
    coeff.segment(4 * n, 4 * n) = 2.0 * w.beta_tilde * r * r * p.q.segment(4 * n, 4 * n);
  }
  coeff(8 * n) = w.theta * smooth_sign(p.q(8 * n) - spec_.target_angle, eps);
  if (spec_.uses_theta_tilde()) {
    for (int pr = 0; pr < 2; ++pr) {
      coeff(8 * n + 1 + pr) = w.theta_tilde * r * smooth_sign(r * p.q(8 * n + 1 + pr), eps);
    }
  }
  const Eigen::VectorXd g = p.dq.transpose() * coeff;
  return {g.data(), g.data() + g.size()};
}

std::vector<double> CostFunction::gradient_fd(const std::vector<double>& x,
                                              double relative_step) const {
  std::vector<double> g(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double typical =
        layout_.slots()[i].kind == SlotKind::kAmplitude ? layout_.omega_max() : 1.0;
    const double h = relative_step * std::max(std::abs(x[i]), typical);
    probe[i] = x[i] + h;
    const double up = evaluate(probe).total;
    probe[i] = x[i] - h;
    const double down = evaluate(probe).total;
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

void CostFunction::residuals(const std::vector<double>& x, Eigen::VectorXd& res,
                             Eigen::MatrixXd* jacobian) const {
  const Partials p = partials(x);
  const int n = kernel_.mode_count();
  const CostWeights& w = spec_.weights;
  const double r = spec_.tilde_rate;

  std::vector<std::pair<int, double>> rows;  // primitive row, scale
  for (int i = 0; i < 4 * n; ++i) rows.emplace_back(i, std::sqrt(w.beta));
  if (spec_.uses_beta_tilde()) {
    for (int i = 0; i < 4 * n; ++i) rows.emplace_back(4 * n + i, std::sqrt(w.beta_tilde) * r);
  }
  rows.emplace_back(8 * n, std::sqrt(w.theta));
  if (spec_.uses_theta_tilde()) {
    rows.emplace_back(8 * n + 1, std::sqrt(w.theta_tilde) * r);
    rows.emplace_back(8 * n + 2, std::sqrt(w.theta_tilde) * r);
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  res.resize(m);
  if (jacobian) jacobian->resize(m, p.dq.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [row, scale] = rows[static_cast<std::size_t>(i)];
    const double offset = row == 8 * n ? spec_.target_angle : 0.0;
    res(i) = scale * (p.q(row) - offset);
    if (jacobian) jacobian->row(i) = scale * p.dq.row(row);
  }
}

CostValue evaluate_cost(const ParamVector& params, const PulseLayout& layout,
                        const ChainModel& chain, const DriveConfig& drive,
                        const CostSpec& spec) {
  return CostFunction(layout, chain, drive, spec).evaluate(params.values);
}

std::vector<double> cost_gradient(const ParamVector& params, const PulseLayout& layout,
                                  const ChainModel& chain, const DriveConfig& drive,
                                  const CostSpec& spec) {
  return CostFunction(layout, chain, drive, spec).gradient(params.values);
}

}  // namespace ionpulse
