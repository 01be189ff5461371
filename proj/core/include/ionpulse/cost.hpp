#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/constants.hpp"
#include "ionpulse/coupling_integrals.hpp"
#include "ionpulse/pulse_schedule.hpp"

namespace ionpulse {

/// Which groups enter the cost.
///  - normal:       |beta|^2 and |theta - pi/4|
///  - beta_robust:  + |beta~|^2
///  - fully_robust: + |beta~|^2 + |theta~|
enum class CostVariant { kNormal, kBetaRobust, kFullyRobust };

std::string to_string(CostVariant v);
/// Accepts "normal", "beta"/"beta_robust", "full"/"fully_robust".
CostVariant parse_cost_variant(const std::string& name);

struct CostWeights {
  double beta = 1.0;
  double beta_tilde = 1.0;
  double theta = 1.0;
  double theta_tilde = 1.0;
};

struct CostSpec {
  CostVariant variant = CostVariant::kFullyRobust;
  CostWeights weights;
  double target_angle = kPi / 4.0;
  /// Smoothing of |x| as sqrt(x^2 + eps^2).
  double epsilon = 1e-12;
  /// beta~ and theta~ carry units of time; they are multiplied by this rate
  /// (rad/s) before entering the cost.
  double tilde_rate = kTwoPi * 1e3;

  bool uses_beta_tilde() const noexcept { return variant != CostVariant::kNormal; }
  bool uses_theta_tilde() const noexcept {
    return variant == CostVariant::kFullyRobust;
  }
  void validate() const;
};

/// Weighted group contributions. All four are always computed; only the
/// groups enabled by the variant are summed into the total.
struct CostBreakdown {
  double beta = 0.0;
  double beta_tilde = 0.0;
  double theta = 0.0;
  double theta_tilde = 0.0;
};

struct CostValue {
  double total = 0.0;
  CostBreakdown groups;
};

/// Cost over a free-parameter vector, with analytic derivatives.
///
/// Evaluation accepts raw optimizer iterates: phases need not be wrapped.
class CostFunction {
 public:
  CostFunction(PulseLayout layout, const ChainModel& chain, const DriveConfig& drive,
               CostSpec spec);

  const PulseLayout& layout() const noexcept { return layout_; }
  const CostSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return layout_.size(); }

  CostValue evaluate(const std::vector<double>& x) const;
  CouplingReport couplings(const std::vector<double>& x) const;

  /// Analytic gradient of the total (chain rule through the closed forms).
  std::vector<double> gradient(const std::vector<double>& x) const;
  /// Central finite differences of the total.
  std::vector<double> gradient_fd(const std::vector<double>& x,
                                  double relative_step = 1e-6) const;

  /// Residual form with the same zero set as the cost:
  ///   sqrt(w) Re/Im beta, sqrt(w) r Re/Im beta~, sqrt(w) (theta - target),
  ///   sqrt(w) r theta~_pair,
  /// restricted to the groups enabled by the variant. The Jacobian is with
  /// respect to the free parameters.
  void residuals(const std::vector<double>& x, Eigen::VectorXd& r,
                 Eigen::MatrixXd* jacobian) const;

 private:
  struct Partials;
  Partials partials(const std::vector<double>& x) const;

  PulseLayout layout_;
  CostSpec spec_;
  CouplingKernel kernel_;
};

CostValue evaluate_cost(const ParamVector& params, const PulseLayout& layout,
                        const ChainModel& chain, const DriveConfig& drive,
                        const CostSpec& spec);

std::vector<double> cost_gradient(const ParamVector& params, const PulseLayout& layout,
                                  const ChainModel& chain, const DriveConfig& drive,
                                  const CostSpec& spec);

}  // namespace ionpulse
