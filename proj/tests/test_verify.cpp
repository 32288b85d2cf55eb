#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvrc/closed_form.hpp"
#include "mvrc/verify.hpp"
#include "support/scenarios.hpp"

using namespace mvrc;

TEST_CASE("coefficient ODEs reproduce the exponential solution") {
  gen::Scenarios g(41);
  for (int i = 0; i < 50; ++i) {
    const gen::Draw d = g.next();
    const double theta = g.uniform(0.2, 10.0);
    const OdeSolution sol = integrate_ansatz(d.market, d.jump, theta, 2000);
    CHECK(sol.t.front() == 0.0);
    CHECK(sol.t.back() == d.market.T);
    CHECK(ansatz_deviation(sol, d.market, d.jump, theta).max() < 1e-8);
    const DerivedCoefficients c = derive(d.market, d.jump);
    const double v = ansatz_value(sol, sol.t[500], 1.2, 0.8);
    CHECK(std::abs(v - tc_value(c, theta, sol.t[500], 1.2, 0.8)) < 1e-8 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("HJB residual vanishes at the candidate") {
  gen::Scenarios g(42);
  for (int i = 0; i < 100; ++i) {
    const gen::Draw d = g.next();
    const double theta = g.uniform(0.2, 10.0);
    for (int k = 0; k < 10; ++k) {
      const double t = g.uniform(0.0, d.market.T);
      const double x = g.uniform(-2.0, 3.0);
      const double y = g.uniform(-2.0, 3.0);
      const double scale = std::max(1.0, std::abs(hjb_supremand(d.market, d.jump, theta, t, x, y, {})));
      CHECK(std::abs(hjb_residual(d.market, d.jump, theta, t, x, y)) < 1e-10 * scale);
    }
  }
}

TEST_CASE("candidate controls maximise the supremand") {
  gen::Scenarios g(43);
  for (int i = 0; i < 100; ++i) {
    const gen::Draw d = g.next();
    const double theta = g.uniform(0.2, 10.0);
    const double t = g.uniform(0.0, d.market.T);
    const Controls star = tc_control(derive(d.market, d.jump), theta, t, t);
    const double best = hjb_supremand(d.market, d.jump, theta, t, 1.0, 0.5, star);
    for (int k = 0; k < 8; ++k) {
      const Controls u{star.pi + g.uniform(-0.5, 0.5), star.L + g.uniform(-0.5, 0.5)};
      CHECK(hjb_supremand(d.market, d.jump, theta, t, 1.0, 0.5, u) < best);
    }
  }
}

TEST_CASE("figure properties at the reference scenario") {
  const FigureReport r = figure_checks(gen::reference(), gen::reference_jump());
  for (const Check& c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  CHECK(r.kappa1_root == doctest::Approx(-0.76).epsilon(1e-10));
  CHECK(r.liability_argmin == doctest::Approx(-0.4143).epsilon(0.001 / 0.4143));
  CHECK(kappa1_root(gen::reference(), gen::reference_jump()) == doctest::Approx(-0.76).epsilon(1e-10));
  CHECK(liability_argmin(gen::reference(), gen::reference_jump()) == doctest::Approx(-0.414335).epsilon(1e-5));
}

TEST_CASE("sensitivity derivatives match analytic slopes") {
  const MarketParams m = gen::reference(0.5);
  const std::vector<SignReport> rows = sensitivity_signs(m, gen::reference_jump(), 2.0, 0.0, 1.0);
  const double d = 0.01 * 0.75 + 0.1 * 0.09;  // beta^2 (1 - rho^2) + lambda g2
  const double disc = std::exp(-0.01) / 2.0;
  for (const SignReport& r : rows) {
    if (r.parameter == "mu_bar" && r.quantity == SignQuantity::pi) {
      CHECK(r.derivative == doctest::Approx((0.01 + 0.009) / (d * 0.0625) * disc).epsilon(1e-6));
    }
    if (r.parameter == "p_bar" && r.quantity == SignQuantity::L) {
      CHECK(r.derivative == doctest::Approx(1.0 / d * disc).epsilon(1e-6));
    }
  }
}

TEST_CASE("published sign table disagrees with the model in known cells") {
  std::set<std::string> failing;
  for (double rho : {-0.5, 0.5}) {
    for (const SignReport& r : sensitivity_signs(gen::reference(rho), gen::reference_jump(), 2.0, 0.0, 1.0)) {
      if (!r.agree) failing.insert(to_string(r.quantity) + "/" + r.parameter + "@" + (rho < 0 ? "-" : "+"));
    }
  }
  const std::set<std::string> expected{"value/rho@-", "L/sigma@-", "value/sigma@-", "value/p_bar@-", "L/sigma@+"};
  CHECK(failing == expected);
}

TEST_CASE("unconstrained cells always agree") {
  for (const SignReport& r : sensitivity_signs(gen::reference(0.3), JumpDistribution::exponential(0.3), 2.0, 0.0,
                                               1.0)) {
    CHECK(r.parameter != "gamma");
    if (!r.constrained) CHECK(r.agree);
  }
}

TEST_CASE("verification report") {
  VerifyOptions opts;
  opts.include_signs = false;
  const VerificationReport r = run_verification(gen::reference(), gen::reference_jump(), opts);
  for (const Check& c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  CHECK(r.pass());

  std::ostringstream out;
  write_report_json(out, r);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["pass"] == true);
  CHECK(doc["checks"].size() == r.checks.size());

  MarketParams ruin = gen::reference();
  ruin.p = 0.1;
  const VerificationReport w = run_verification(ruin, gen::reference_jump(), opts);
  REQUIRE(w.warnings.size() == 1);
  CHECK(w.warnings[0].find("ruin occurs for sure") != std::string::npos);
  CHECK(w.pass());
}
