#include <doctest.h>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/errors.hpp"
#include "ionpulse/fidelity.hpp"
#include "ionpulse/optimizer.hpp"

using namespace ionpulse;

namespace {

struct Toy {
  ChainModel chain;
  DriveConfig drive{to_angular(3.15e6), 0.0};
  PulseLayout layout = PulseLayout::standard(2, 100e-6, to_angular(2e6), {0, 1});

  Toy() {
    TrapConfig t;
    t.ion_count = 2;
    chain = build_chain(t);
  }
};

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("two-ion normal variant converges to a perfect gate") {
  Toy toy;
  CostSpec spec;
  spec.variant = CostVariant::kNormal;
  OptimizerConfig cfg;
  cfg.restarts = 4;
  const OptimizeResult r = optimize(toy.layout, toy.chain, toy.drive, spec, cfg);
  CHECK(r.converged);
  CHECK(r.cost.total < 1e-8);
  const PulseSchedule s = build_schedule(r.best, toy.layout);
  const FidelityResult f = ms_fidelity(evaluate_couplings(s, toy.chain, toy.drive),
                                       ThermalEnv{0.0, Eigen::VectorXd::Zero(2)});
  CHECK(f.infidelity() < 1e-6);
  for (std::size_t i = 0; i < r.best.size(); ++i) {
    if (toy.layout.slots()[i].kind == SlotKind::kPhase) {
      CHECK(r.best[i] > -kPi);
      CHECK(r.best[i] <= kPi);
    }
  }
  REQUIRE(r.trace.size() >= 2);
  CHECK(r.trace.front().iteration == 0);
  CHECK(r.trace.back().cost <= r.trace.front().cost);
}

TEST_CASE("results do not depend on the thread count") {
  Toy toy;
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.max_iterations = 60;
  cfg.threads = 1;
  const OptimizeResult a = optimize(toy.layout, toy.chain, toy.drive, CostSpec{}, cfg);
  cfg.threads = 4;
  const OptimizeResult b = optimize(toy.layout, toy.chain, toy.drive, CostSpec{}, cfg);
  CHECK(a.best == b.best);
  CHECK(a.best_restart == b.best_restart);
  CHECK(a.cost.total == b.cost.total);
  REQUIRE(a.best_so_far.size() == 6);
  for (std::size_t i = 1; i < a.best_so_far.size(); ++i) {
    CHECK(a.best_so_far[i] <= a.best_so_far[i - 1]);
  }
  CHECK(a.best_so_far.back() == a.cost.total);

  cfg.seed += 1;
  const OptimizeResult c = optimize(toy.layout, toy.chain, toy.drive, CostSpec{}, cfg);
  CHECK_FALSE(c.best == a.best);
}

TEST_CASE("zero iteration budget returns the start point") {
  Toy toy;
  OptimizerConfig cfg;
  cfg.restarts = 1;
  cfg.max_iterations = 0;
  const OptimizeResult r = optimize(toy.layout, toy.chain, toy.drive, CostSpec{}, cfg);
  const ParamVector start = initial_point(toy.layout, cfg, 0);
  CHECK_FALSE(r.converged);
  REQUIRE(r.best.size() == start.size());
  for (std::size_t i = 0; i < start.size(); ++i) {
    CHECK(r.best[i] == doctest::Approx(start[i]).epsilon(1e-15));
  }
  CHECK(r.restarts[0].iterations == 0);
}

TEST_CASE("start points are reproducible and in range") {
  Toy toy;
  OptimizerConfig cfg;
  const ParamVector a = initial_point(toy.layout, cfg, 3);
  CHECK(a == initial_point(toy.layout, cfg, 3));
  CHECK_FALSE(a == initial_point(toy.layout, cfg, 4));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (toy.layout.slots()[i].kind == SlotKind::kAmplitude) {
      CHECK(a[i] >= 0.1 * toy.layout.omega_max());
      CHECK(a[i] <= 0.9 * toy.layout.omega_max());
    } else {
      CHECK(a[i] > -kPi);
      CHECK(a[i] <= kPi);
    }
  }
}

TEST_CASE("configuration validation") {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.init_amplitude_high = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}
