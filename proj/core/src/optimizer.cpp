#include "ionpulse/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

struct RestartOutcome {
  std::vector<double> x;
  CostValue cost;
  RestartSummary summary;
  std::vector<TracePoint> trace;
};

RestartOutcome run_restart(const CostFunction& cost, const OptimizerConfig& config,
                           int index) {
  const PulseLayout& layout = cost.layout();
  const std::size_t n = layout.size();

  // Work in scaled coordinates: amplitudes as fractions of omega_max.
  Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
  Eigen::VectorXd lo(scale.size()), hi(scale.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool amp = layout.slots()[i].kind == SlotKind::kAmplitude;
    const auto e = static_cast<Eigen::Index>(i);
    scale(e) = amp ? layout.omega_max() : 1.0;
    lo(e) = amp ? 0.0 : -std::numeric_limits<double>::infinity();
    hi(e) = amp ? 1.0 : std::numeric_limits<double>::infinity();
  }
  auto to_x = [&](const Eigen::VectorXd& y) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = y(static_cast<Eigen::Index>(i)) * scale(static_cast<Eigen::Index>(i));
    }
    return x;
  };

  const ParamVector start = initial_point(layout, config, index);
  Eigen::VectorXd y(scale.size());
  for (std::size_t i = 0; i < n; ++i) {
    y(static_cast<Eigen::Index>(i)) = start[i] / scale(static_cast<Eigen::Index>(i));
  }

  RestartOutcome out;
  out.summary.index = index;

  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd jac;
  std::vector<double> x = to_x(y);
  cost.residuals(x, r, &jac);
  jac = jac * scale.asDiagonal();
  double f = r.squaredNorm();
  CostValue value = cost.evaluate(x);
  out.summary.initial_cost = value.total;
  out.trace.push_back({0, value.total, value.groups});

  out.x = x;
  out.cost = value;

  double lambda = -1.0;
  double nu = 2.0;
  int it = 0;
  while (it < config.max_iterations && value.total >= config.cost_tolerance) {
    ++it;
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd d = a.diagonal();
    const double dmax = std::max(d.maxCoeff(), 1e-300);
    d = d.cwiseMax(1e-12 * dmax);
    if (lambda < 0.0) lambda = 1e-3;

    Eigen::MatrixXd m = a;
    m.diagonal() += lambda * d;
    const Eigen::VectorXd p = m.ldlt().solve(-g);
    const Eigen::VectorXd y_try = (y + p).cwiseMax(lo).cwiseMin(hi);
    const Eigen::VectorXd step = y_try - y;
    if (!step.allFinite() ||
        step.norm() <= config.step_tolerance * (y.norm() + config.step_tolerance)) {
      break;
    }

    const std::vector<double> x_try = to_x(y_try);
    cost.residuals(x_try, r_try, nullptr);
    const double f_try = r_try.squaredNorm();
    const double predicted = f - (r + jac * step).squaredNorm();
    if (f_try < f && predicted > 0.0) {
      const double rho = (f - f_try) / predicted;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      y = y_try;
      x = x_try;
      cost.residuals(x, r, &jac);
      jac = jac * scale.asDiagonal();
      f = r.squaredNorm();
      value = cost.evaluate(x);
      out.trace.push_back({it, value.total, value.groups});
      if (value.total < out.cost.total) {
        out.x = x;
        out.cost = value;
      }
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e30) break;
    }
  }

  out.summary.iterations = it;
  out.summary.final_cost = out.cost.total;
  out.summary.converged = out.cost.total < config.cost_tolerance;
  return out;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iterations < 0) throw ConfigError("optimizer max_iterations must be >= 0");
  if (!(cost_tolerance > 0.0)) throw ConfigError("optimizer cost_tolerance must be > 0");
  if (!(step_tolerance > 0.0)) throw ConfigError("optimizer step_tolerance must be > 0");
  if (restarts < 1) throw ConfigError("optimizer restarts must be >= 1");
  if (threads < 0) throw ConfigError("optimizer threads must be >= 0");
  if (!(init_amplitude_low >= 0.0 && init_amplitude_low <= init_amplitude_high &&
        init_amplitude_high <= 1.0)) {
    throw ConfigError("optimizer initial amplitude range must lie within [0, 1]");
  }
}

ParamVector initial_point(const PulseLayout& layout, const OptimizerConfig& config,
                          int restart) {
  std::mt19937_64 gen(splitmix64(splitmix64(config.seed) + static_cast<std::uint64_t>(restart)));
  ParamVector p;
  p.values.reserve(layout.size());
  for (const ParamSlot& slot : layout.slots()) {
    const double u = unit_double(gen);
    if (slot.kind == SlotKind::kAmplitude) {
      const double frac = config.init_amplitude_low +
                          (config.init_amplitude_high - config.init_amplitude_low) * u;
      p.values.push_back(frac * layout.omega_max());
    } else {
      p.values.push_back(kPi - kTwoPi * u);  // (-pi, pi]
    }
  }
  return p;
}

OptimizeResult optimize(const CostFunction& cost, const OptimizerConfig& config) {
  config.validate();
  const int restarts = config.restarts;
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, restarts);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < restarts; i = next++) {
      try {
        outcomes[static_cast<std::size_t>(i)] = run_restart(cost, config, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  OptimizeResult result;
  int best = 0;
  double running = std::numeric_limits<double>::infinity();
  for (int i = 0; i < restarts; ++i) {
    const RestartOutcome& o = outcomes[static_cast<std::size_t>(i)];
    result.restarts.push_back(o.summary);
    if (o.cost.total < outcomes[static_cast<std::size_t>(best)].cost.total) best = i;
    running = std::min(running, o.cost.total);
    result.best_so_far.push_back(running);
  }
  RestartOutcome& winner = outcomes[static_cast<std::size_t>(best)];
  result.best_restart = best;
  result.trace = std::move(winner.trace);
  result.converged = winner.summary.converged;

  result.best.values = winner.x;
  for (std::size_t i = 0; i < result.best.size(); ++i) {
    if (cost.layout().slots()[i].kind == SlotKind::kPhase) {
      result.best[i] = wrap_phase(result.best[i]);
    }
  }
  result.cost = cost.evaluate(result.best.values);
  return result;
}

OptimizeResult optimize(const PulseLayout& layout, const ChainModel& chain,
                        const DriveConfig& drive, const CostSpec& spec,
                        const OptimizerConfig& config) {
  return optimize(CostFunction(layout, chain, drive, spec), config);
}

}  // namespace ionpulse
