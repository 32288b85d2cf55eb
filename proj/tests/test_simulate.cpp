#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mvrc/closed_form.hpp"
#include "mvrc/errors.hpp"
#include "mvrc/simulate.hpp"
#include "support/scenarios.hpp"

using namespace mvrc;

namespace {

SimulationConfig config(std::size_t paths, std::size_t steps = 252, bool antithetic = false) {
  SimulationConfig c;
  c.n_paths = paths;
  c.steps_per_year = steps;
  c.antithetic = antithetic;
  return c;
}

bool within(const Estimate& e, double reference, double k = 3.0) { return std::abs(e.value - reference) <= k * e.se; }

}  // namespace

TEST_CASE("step count") {
  CHECK(step_count(config(10), 0.0, 1.0) == 252);
  CHECK(step_count(config(10), 0.5, 1.0) == 126);
  CHECK(step_count(config(10), 0.0, 1e-6) == 1);
  CHECK(step_count(config(10, 12), 0.0, 10.0) == 120);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(config(1)), DomainError);
  CHECK_THROWS_AS(validate(config(10, 0)), DomainError);
  CHECK_THROWS_AS(validate(config(11, 252, true)), DomainError);
  CHECK_NOTHROW(validate(config(12, 252, true)));

  const DerivedCoefficients c = derive(gen::reference(), gen::reference_jump());
  const Strategy s = Strategy::zero(c, 0.0);
  CHECK_THROWS_AS(simulate_wealth(gen::reference(), gen::reference_jump(), s, config(1), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(simulate_wealth(gen::reference(), gen::reference_jump(), s, config(10), 1.0, 1.0), DomainError);
}

TEST_CASE("samples do not depend on the thread count") {
  const MarketParams m = gen::reference(0.3);
  const DerivedCoefficients c = derive(m, gen::reference_jump());
  for (const Strategy& s : {Strategy::time_consistent(c, 2.0, 0.0), Strategy::precommit(c, 2.0, 0.0, 1.0)}) {
    SimulationConfig a = config(3000, 52);
    a.threads = 1;
    SimulationConfig b = a;
    b.threads = 7;
    const TerminalSamples x = simulate_wealth(m, gen::reference_jump(), s, a, 0.0, 1.0);
    const TerminalSamples y = simulate_wealth(m, gen::reference_jump(), s, b, 0.0, 1.0);
    CHECK(x.values == y.values);

    SimulationConfig other = a;
    other.seed += 1;
    CHECK(simulate_wealth(m, gen::reference_jump(), s, other, 0.0, 1.0).values != x.values);
  }
}

TEST_CASE("riskless strategy compounds deterministically") {
  MarketParams m = gen::reference();
  const JumpDistribution j = gen::reference_jump();
  const Strategy zero = Strategy::zero(derive(m, j), 0.0);
  double previous = INFINITY;
  for (std::size_t n : {4, 16, 64, 256}) {
    const TerminalSamples s = simulate_wealth(m, j, zero, config(8, n), 0.0, 2.0);
    const double euler = 2.0 * std::pow(1.0 + 0.01 / static_cast<double>(n), static_cast<double>(n));
    for (double v : s.values) CHECK(v == doctest::Approx(euler).epsilon(1e-13));
    const double err = std::abs(s.values[0] - 2.0 * std::exp(0.01));
    CHECK(err <= 2.0 * 0.01 * 0.01 / static_cast<double>(n));
    CHECK(err < previous);
    previous = err;
  }

  m.r = 0.0;
  for (double v : simulate_wealth(m, j, zero, config(50), 0.0, 1.7).values) CHECK(v == 1.7);
}

TEST_CASE("time-consistent moments at the reference scenario") {
  for (double rho : {-0.5, 0.0, 0.5}) {
    const MarketParams m = gen::reference(rho);
    const DerivedCoefficients c = derive(m, gen::reference_jump());
    const Strategy s = Strategy::time_consistent(c, 2.0, 0.0);
    const TerminalSamples x = simulate_wealth(m, gen::reference_jump(), s, config(20000), 0.0, 1.0);
    const ObjectiveEstimates e = estimate_objectives(x, 2.0, auxiliary_Y(m, gen::reference_jump(), s, 0.0, 1.0, 1.0));
    const Moments ref = tc_moments(c, 2.0, 0.0, 1.0, 1.0);
    CAPTURE(rho);
    CHECK(within(e.stats.mean, ref.mean));
    CHECK(within(e.stats.variance, ref.variance));
    CHECK(within(e.modified, tc_value(c, 2.0, 0.0, 1.0, 1.0)));
  }
}

TEST_CASE("precommitment moments at the reference scenario") {
  const MarketParams m = gen::reference(0.0);
  const DerivedCoefficients c = derive(m, gen::reference_jump());
  const Strategy s = Strategy::precommit(c, 2.0, 0.0, 1.0);
  const TerminalSamples x = simulate_wealth(m, gen::reference_jump(), s, config(20000), 0.0, 1.0);
  const ObjectiveEstimates e = estimate_objectives(x, 2.0, 0.0);
  const Moments ref = pre_moments(c, 2.0, 0.0, 1.0);
  CHECK(within(e.stats.mean, ref.mean));
  CHECK(within(e.stats.variance, ref.variance));
  CHECK(within(e.stats.objective, pre_value(c, 2.0, 0.0, 1.0)));
}

TEST_CASE("antithetic pairs leave the mean unbiased") {
  const MarketParams m = gen::reference(-0.3);
  const JumpDistribution j = JumpDistribution::exponential(0.3);
  const DerivedCoefficients c = derive(m, j);
  const Strategy s = Strategy::time_consistent(c, 2.0, 0.0);
  const TerminalSamples plain = simulate_wealth(m, j, s, config(10000, 52), 0.0, 1.0);
  const TerminalSamples anti = simulate_wealth(m, j, s, config(10000, 52, true), 0.0, 1.0);
  CHECK(anti.antithetic);
  const ObjectiveEstimates a = estimate_objectives(plain, 2.0, 0.0);
  const ObjectiveEstimates b = estimate_objectives(anti, 2.0, 0.0);
  CHECK(b.stats.n_effective == 5000);
  const double joint = std::hypot(a.stats.mean.se, b.stats.mean.se);
  CHECK(std::abs(a.stats.mean.value - b.stats.mean.value) <= 3.0 * joint);
  CHECK(within(b.stats.mean, tc_moments(c, 2.0, 0.0, 1.0, 1.0).mean));
}

TEST_CASE("Euler bias halves as the step doubles") {
  MarketParams m = gen::reference(0.0);
  m.r = 0.2;
  m.mu = 0.25;
  const JumpDistribution j = gen::reference_jump();
  const DerivedCoefficients c = derive(m, j);
  const double theta = 1000.0;
  const Strategy s = Strategy::time_consistent(c, theta, 0.0);
  const double exact = tc_moments(c, theta, 0.0, 1.0, 1.0).mean;
  std::vector<double> errors;
  for (std::size_t n : {4, 8, 16, 32}) {
    const TerminalSamples x = simulate_wealth(m, j, s, config(20000, n), 0.0, 1.0);
    const ObjectiveEstimates e = estimate_objectives(x, theta, 0.0);
    CHECK(e.stats.mean.se < 1e-5);
    errors.push_back(std::abs(e.stats.mean.value - exact));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    CHECK(errors[i] < errors[i - 1]);
    CHECK(errors[i - 1] / errors[i] == doctest::Approx(2.0).epsilon(0.2));
  }
}

TEST_CASE("auxiliary process tracks the mean") {
  gen::Scenarios g(31);
  for (int i = 0; i < 100; ++i) {
    const gen::Draw d = g.next();
    const DerivedCoefficients c = derive(d.market, d.jump);
    const double theta = g.uniform(0.5, 5.0);
    const Strategy s = Strategy::time_consistent(c, theta, 0.0);
    const double y = auxiliary_Y(d.market, d.jump, s, 0.0, 1.3, d.market.T);
    CHECK(gen::rel(y, tc_moments(c, theta, 0.0, 1.3, d.market.T).mean) < 1e-10);
  }
  const DerivedCoefficients c = derive(gen::reference(), gen::reference_jump());
  CHECK_THROWS_AS(auxiliary_Y(gen::reference(), gen::reference_jump(), Strategy::precommit(c, 2.0, 0.0, 1.0), 0.0,
                              1.0, 1.0),
                  Unsupported);
}

TEST_CASE("quadratic loss under the auxiliary controls") {
  const MarketParams m = gen::reference(0.0);
  const DerivedCoefficients c = derive(m, gen::reference_jump());
  for (double xi : {1.1, 1.2, 1.5}) {
    const Strategy s = Strategy::aux_quadratic(c, xi, 0.0);
    const TerminalSamples x = simulate_wealth(m, gen::reference_jump(), s, config(20000), 0.0, 1.0);
    CAPTURE(xi);
    CHECK(within(estimate_quadratic_loss(x, xi), aux_value(c, xi, 0.0, 1.0)));
  }
}

TEST_CASE("estimators on a known sample") {
  TerminalSamples s;
  s.values = {1.0, 2.0, 3.0, 4.0};
  const ObjectiveEstimates e = estimate_objectives(s, 2.0, 2.0);
  CHECK(e.stats.mean.value == 2.5);
  CHECK(e.stats.mean.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.stats.variance.value == doctest::Approx(5.0 / 3.0));
  // fourth central moment 41/16, s^2 = 5/3: (m4 - (n-3)/(n-1) s^4) / n
  CHECK(e.stats.variance.se == doctest::Approx(std::sqrt((41.0 / 16 - 1.0 / 3 * 25.0 / 9) / 4)));
  CHECK(e.stats.objective.value == doctest::Approx(2.5 - 5.0 / 3.0));
  CHECK(e.modified.value == doctest::Approx(2.5 - (1 + 0 + 1 + 4) / 4.0));
  CHECK(estimate_quadratic_loss(s, 0.0).value == doctest::Approx(7.5));

  TerminalSamples one;
  one.values = {1.0};
  CHECK_THROWS_AS(estimate_objectives(one, 1.0, 0.0), InsufficientSamples);
  TerminalSamples pair;
  pair.values = {1.0, 2.0};
  pair.antithetic = true;
  CHECK_THROWS_AS(estimate_quadratic_loss(pair, 0.0), InsufficientSamples);

  std::ostringstream out;
  write_samples(out, s);
  CHECK(out.str() == "1\n2\n3\n4\n");
}
