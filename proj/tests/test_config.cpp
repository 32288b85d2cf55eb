#include <doctest.h>

#include <sstream>

#include "mvrc/config.hpp"
#include "mvrc/errors.hpp"

using namespace mvrc;

namespace {

const char* kBase =
    "# reference\n"
    "r = 0.01\n"
    "mu = 0.05\n"
    "sigma = 0.25   # trailing comment\n"
    "alpha = 0.08\n"
    "beta = 0.1\n"
    "rho = 0\n"
    "lambda = 0.1\n"
    "p = 0.15\n"
    "T = 1\n"
    "theta = 2\n"
    "\n"
    "jump.kind = constant\n"
    "jump.param1 = 0.3\n";

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

std::string without(const std::string& key) {
  std::istringstream in(kBase);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " ", 0) != 0) out += line + "\n";
  }
  return out;
}

std::string replaced(const std::string& key, const std::string& value) {
  return without(key) + key + " = " + value + "\n";
}

}  // namespace

TEST_CASE("parses the reference scenario") {
  const Scenario s = parse(kBase);
  CHECK(s.market.r == 0.01);
  CHECK(s.market.sigma == 0.25);
  CHECK(s.market.T == 1.0);
  CHECK(s.preference.theta == 2.0);
  CHECK(s.jump.kind() == JumpKind::constant);
  CHECK(s.jump.param1() == 0.3);
}

TEST_CASE("missing keys are named") {
  for (const char* key : {"sigma", "r", "theta", "jump.kind", "jump.param1"}) {
    CAPTURE(key);
    try {
      parse(without(key));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(std::string("'") + key + "'") != std::string::npos);
    }
  }
}

TEST_CASE("unknown and duplicate keys carry line numbers") {
  try {
    parse(std::string(kBase) + "sigam = 0.2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 15);
    CHECK(std::string(e.what()).find("unknown key 'sigam'") != std::string::npos);
  }
  try {
    parse(std::string(kBase) + "mu = 0.06\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 15);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(std::string(kBase) + "just text\n"), ConfigError);
  CHECK_THROWS_AS(parse(replaced("mu", "0.05x")), ConfigError);
  CHECK_THROWS_AS(parse(replaced("mu", "")), ConfigError);
  CHECK_THROWS_AS(parse(replaced("jump.kind", "pareto")), ConfigError);
}

TEST_CASE("model-level rejections keep their types") {
  CHECK_THROWS_WITH_AS(parse(replaced("theta", "0")), "theta must be positive", DomainError);
  CHECK_THROWS_AS(parse(replaced("sigma", "-0.2")), DomainError);
  CHECK_THROWS_AS(parse(replaced("rho", "1.2")), DomainError);
  std::string degenerate = without("lambda") + "lambda = 0\n";
  degenerate.replace(degenerate.find("rho = 0"), 7, "rho = 1");
  CHECK_THROWS_AS(parse(degenerate), DegenerateModel);
}

TEST_CASE("lognormal claims need a second parameter") {
  const std::string base = replaced("jump.kind", "lognormal");
  CHECK_THROWS_AS(parse(base), ConfigError);
  const Scenario s = parse(base + "jump.param2 = 0.4\n");
  CHECK(s.jump.kind() == JumpKind::lognormal);
  CHECK(s.jump.param2() == 0.4);
}

TEST_CASE("write and parse round trip") {
  const Scenario a = parse(replaced("jump.kind", "lognormal") + "jump.param2 = 0.4\n");
  std::ostringstream out;
  write_scenario(out, a);
  const Scenario b = parse(out.str());
  CHECK(b.market.mu == a.market.mu);
  CHECK(b.market.rho == a.market.rho);
  CHECK(b.jump.param2() == a.jump.param2());
  CHECK(b.preference.theta == a.preference.theta);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), ConfigError); }
