#include <doctest.h>

#include <cmath>
#include <limits>

#include "mvrc/errors.hpp"
#include "mvrc/model.hpp"
#include "support/oracle.hpp"
#include "support/scenarios.hpp"

using namespace mvrc;

TEST_CASE("kappas at the reference scenario") {
  const DerivedCoefficients c = derive(gen::reference(0.0), gen::reference_jump());
  CHECK(c.kappa1 == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(c.kappa2 == doctest::Approx(2.1052631578947363).epsilon(1e-14));
  CHECK(c.kappa3 == doctest::Approx(0.10981052631578943).epsilon(1e-14));
  CHECK(c.gamma_bar1 == 0.3);
  CHECK(c.gamma_bar2 == doctest::Approx(0.09));
  CHECK(c.net_premium == doctest::Approx(0.04));

  const DerivedCoefficients h = derive(gen::reference(0.5), gen::reference_jump());
  CHECK(h.kappa1 == doctest::Approx(1.221818181818182).epsilon(1e-13));
  CHECK(h.kappa2 == doctest::Approx(2.9090909090909087).epsilon(1e-13));
  CHECK(h.kappa3 == doctest::Approx(0.16523636363636364).epsilon(1e-13));
}

TEST_CASE("kappas agree with the first-order-system oracle on random scenarios") {
  gen::Scenarios g(11);
  for (int i = 0; i < 2000; ++i) {
    const gen::Draw d = g.next();
    const JumpMoments mo = d.jump.moments();
    const oracle::Kappas o = oracle::kappas(d.market, mo.first, mo.second);
    const DerivedCoefficients c = derive(d.market, d.jump);
    CHECK(gen::rel(c.kappa1, o.k1) < 1e-11);
    CHECK(gen::rel(c.kappa2, o.k2) < 1e-11);
    CHECK(gen::rel(c.kappa3, o.k3) < 1e-11);
    CHECK(gen::rel(c.kappa4, o.k4) < 1e-12);
  }
}

TEST_CASE("both kappa3 forms agree") {
  gen::Scenarios g(12);
  for (int i = 0; i < 10000; ++i) {
    const gen::Draw d = g.next();
    const Kappa3Forms k = kappa3_forms(d.market, d.jump.moments());
    REQUIRE(gen::rel(k.expanded, k.completed_square) < 1e-12);
  }
}

TEST_CASE("kappas are continuous in rho") {
  MarketParams m = gen::reference();
  const JumpDistribution j = gen::reference_jump();
  for (double rho = -0.99; rho < 0.99; rho += 0.01) {
    m.rho = rho;
    const DerivedCoefficients a = derive(m, j);
    m.rho = rho + 1e-9;
    const DerivedCoefficients b = derive(m, j);
    CHECK(std::abs(a.kappa1 - b.kappa1) < 1e-6);
    CHECK(std::abs(a.kappa2 - b.kappa2) < 1e-6);
    CHECK(std::abs(a.kappa3 - b.kappa3) < 1e-6);
  }
}

TEST_CASE("no jumps reduces to the pure-diffusion coefficients") {
  gen::Scenarios g(13);
  for (int i = 0; i < 200; ++i) {
    MarketParams m = g.next().market;
    m.lambda = 0.0;
    const DerivedCoefficients c = derive(m, JumpDistribution::constant(0.5));
    const double mb = m.mu - m.r;
    const double pb = m.p - m.alpha;
    const double s = m.sigma;
    const double b = m.beta;
    const double one_minus = 1 - m.rho * m.rho;
    CHECK(gen::rel(c.kappa1, (mb + m.rho * pb * s / b) / (s * s * one_minus)) < 1e-11);
    CHECK(gen::rel(c.kappa2, (m.rho * b * mb + pb * s) / (b * b * one_minus * s)) < 1e-11);
  }
}

TEST_CASE("no liability diffusion reduces to the compound-Poisson coefficients") {
  gen::Scenarios g(14);
  for (int i = 0; i < 200; ++i) {
    gen::Draw d = g.next();
    d.market.alpha = 0.0;
    d.market.beta = 0.0;
    const DerivedCoefficients c = derive(d.market, d.jump);
    const JumpMoments mo = d.jump.moments();
    const double mb = d.market.mu - d.market.r;
    const double q = d.market.p - d.market.lambda * mo.first;
    CHECK(gen::rel(c.kappa1, mb / (d.market.sigma * d.market.sigma)) < 1e-12);
    CHECK(gen::rel(c.kappa2, q / (d.market.lambda * mo.second)) < 1e-12);
    CHECK(gen::rel(c.kappa3, mb * mb / (d.market.sigma * d.market.sigma) + q * q / (d.market.lambda * mo.second)) <
          1e-12);
  }
}

TEST_CASE("jump moments") {
  const JumpMoments c = JumpDistribution::constant(0.3).moments();
  CHECK(c.first == 0.3);
  CHECK(c.second == doctest::Approx(0.09));
  const JumpMoments e = JumpDistribution::exponential(0.5).moments();
  CHECK(e.first == 0.5);
  CHECK(e.second == doctest::Approx(0.5));
  const JumpMoments l = JumpDistribution::lognormal(-0.1, 0.4).moments();
  CHECK(l.first == doctest::Approx(std::exp(-0.1 + 0.08)));
  CHECK(l.second == doctest::Approx(std::exp(-0.2 + 0.32)));
  CHECK_THROWS_AS(JumpDistribution::constant(0.0), DomainError);
  CHECK_THROWS_AS(JumpDistribution::exponential(-1.0), DomainError);
  CHECK_THROWS_AS(JumpDistribution::lognormal(0.0, -0.1), DomainError);
  CHECK(parse_jump_kind("exponential") == JumpKind::exponential);
  CHECK(to_string(JumpKind::lognormal) == "lognormal");
  CHECK_THROWS_AS(parse_jump_kind("gamma"), DomainError);
}

TEST_CASE("jump samplers match their analytic moments") {
  for (const JumpDistribution& j : {JumpDistribution::constant(0.3), JumpDistribution::exponential(0.7),
                                    JumpDistribution::lognormal(-0.3, 0.5)}) {
    Rng rng(5);
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    double s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = j.sample(rng);
      s1 += v;
      s2 += v * v;
      s4 += v * v * v * v;
    }
    const JumpMoments mo = j.moments();
    const double m1 = s1 / n;
    const double m2 = s2 / n;
    const double se1 = std::sqrt(std::max(0.0, m2 - m1 * m1) / n);
    const double se2 = std::sqrt(std::max(0.0, s4 / n - m2 * m2) / n);
    CHECK(std::abs(m1 - mo.first) <= 4 * se1 + 1e-10 * mo.first);
    CHECK(std::abs(m2 - mo.second) <= 4 * se2 + 1e-10 * mo.second);
  }
}

TEST_CASE("validation errors") {
  const JumpDistribution j = gen::reference_jump();
  MarketParams m = gen::reference();
  CHECK_NOTHROW(validate(m, j));

  m.sigma = 0.0;
  CHECK_THROWS_AS(validate(m, j), DomainError);
  m = gen::reference();
  m.rho = 1.5;
  CHECK_THROWS_AS(validate(m, j), DomainError);
  m = gen::reference();
  m.beta = -0.1;
  CHECK_THROWS_AS(validate(m, j), DomainError);
  m = gen::reference();
  m.lambda = -0.1;
  CHECK_THROWS_AS(validate(m, j), DomainError);
  m = gen::reference();
  m.T = 0.0;
  CHECK_THROWS_AS(validate(m, j), DomainError);
  m = gen::reference();
  m.mu = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(m, j), DomainError);

  m = gen::reference();
  m.lambda = 0.0;
  m.rho = 1.0;
  CHECK_THROWS_AS(validate(m, j), DegenerateModel);
  CHECK_THROWS_AS(derive(m, j), DegenerateModel);
  m.beta = 0.0;
  m.rho = 0.0;
  CHECK_THROWS_AS(validate(m, j), DegenerateModel);

  CHECK_THROWS_WITH_AS(validate(Preference{0.0}), "theta must be positive", DomainError);
  CHECK_THROWS_AS(validate(Preference{-1.0}), DomainError);
}

TEST_CASE("economic warnings are not errors") {
  MarketParams m = gen::reference();
  CHECK(validate(m, gen::reference_jump()).warnings.empty());

  m.p = 0.1;  // p - alpha = 0.02 < lambda E[gamma] = 0.03
  const ValidationReport r = validate(m, gen::reference_jump());
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("ruin occurs for sure") != std::string::npos);

  m = gen::reference();
  m.mu = 0.005;
  CHECK(validate(m, gen::reference_jump()).warnings.size() == 1);
}
