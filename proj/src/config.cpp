#include "mvrc/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "mvrc/errors.hpp"
#include "mvrc/format.hpp"

namespace mvrc {

namespace {

constexpr std::array<const char*, 13> kKeys{"r",     "mu", "sigma", "alpha",     "beta",        "rho",        "lambda",
                                            "p",     "T",  "theta", "jump.kind", "jump.param1", "jump.param2"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known(const std::string& key) {
  for (const char* k : kKeys) {
    if (key == k) return true;
  }
  return false;
}

struct Entry {
  std::string value;
  int line;
};

double number(const std::map<std::string, Entry>& entries, const std::string& key) {
  const auto it = entries.find(key);
  if (it == entries.end()) throw ConfigError("missing required key '" + key + "'");
  const std::string& text = it->second.value;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("value of '" + key + "' is not a number: '" + text + "'", it->second.line);
  }
  return v;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (!known(key)) throw ConfigError("unknown key '" + key + "'", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")",
                        line);
    }
    entries.emplace(key, Entry{value, line});
  }

  const auto kind_it = entries.find("jump.kind");
  if (kind_it == entries.end()) throw ConfigError("missing required key 'jump.kind'");
  JumpKind kind{};
  try {
    kind = parse_jump_kind(kind_it->second.value);
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), kind_it->second.line);
  }

  MarketParams m;
  m.r = number(entries, "r");
  m.mu = number(entries, "mu");
  m.sigma = number(entries, "sigma");
  m.alpha = number(entries, "alpha");
  m.beta = number(entries, "beta");
  m.rho = number(entries, "rho");
  m.lambda = number(entries, "lambda");
  m.p = number(entries, "p");
  m.T = number(entries, "T");
  const Preference pref{number(entries, "theta")};
  const double p1 = number(entries, "jump.param1");
  double p2 = 0.0;
  if (kind == JumpKind::lognormal) {
    p2 = number(entries, "jump.param2");
  } else if (entries.count("jump.param2")) {
    number(entries, "jump.param2");  // still has to be well formed
  }

  Scenario s{m, pref, JumpDistribution::make(kind, p1, p2)};
  validate(s.market, s.jump);
  validate(s.preference);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& s) {
  const MarketParams& m = s.market;
  out << "r = " << format_number(m.r) << '\n'
      << "mu = " << format_number(m.mu) << '\n'
      << "sigma = " << format_number(m.sigma) << '\n'
      << "alpha = " << format_number(m.alpha) << '\n'
      << "beta = " << format_number(m.beta) << '\n'
      << "rho = " << format_number(m.rho) << '\n'
      << "lambda = " << format_number(m.lambda) << '\n'
      << "p = " << format_number(m.p) << '\n'
      << "T = " << format_number(m.T) << '\n'
      << "theta = " << format_number(s.preference.theta) << '\n'
      << "jump.kind = " << to_string(s.jump.kind()) << '\n'
      << "jump.param1 = " << format_number(s.jump.param1()) << '\n';
  if (s.jump.kind() == JumpKind::lognormal) out << "jump.param2 = " << format_number(s.jump.param2()) << '\n';
}

}  // namespace mvrc
