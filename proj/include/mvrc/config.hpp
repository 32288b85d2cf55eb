/**
 * @file config.hpp
 * @brief Scenario files.
 *
 * One `key = value` pair per line; `#` starts a comment. Required keys:
 * r, mu, sigma, alpha, beta, rho, lambda, p, T, theta, jump.kind,
 * jump.param1, plus jump.param2 when jump.kind is lognormal. Unknown and
 * repeated keys are rejected so a typo cannot silently change a scenario.
 */

#pragma once

#include <iosfwd>
#include <string>

#include "mvrc/model.hpp"

namespace mvrc {

struct Scenario {
  MarketParams market;
  Preference preference;
  JumpDistribution jump;
};

/// Parses and validates a scenario. ConfigError for syntax problems,
/// DomainError or DegenerateModel for values the model rejects.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

/// Writes a scenario back in the same format.
void write_scenario(std::ostream& out, const Scenario& scenario);

}  // namespace mvrc
