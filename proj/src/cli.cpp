#include "mvrc/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mvrc/closed_form.hpp"
#include "mvrc/config.hpp"
#include "mvrc/errors.hpp"
#include "mvrc/format.hpp"
#include "mvrc/simulate.hpp"
#include "mvrc/verify.hpp"

namespace mvrc {

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::uint64_t seed = SimulationConfig{}.seed;
};

/// Writes comma-separated rows with shortest round-trip numbers.
class Csv {
 public:
  explicit Csv(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names) { row_strings(names); }

  void row(const std::string& label, const std::vector<double>& values) {
    out_ << label;
    for (double v : values) out_ << ',' << format_number(v);
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

void write_preamble(std::ostream& out, const DerivedCoefficients& c, const std::vector<std::string>& warnings) {
  out << "# kappa1 = " << format_number(c.kappa1) << '\n'
      << "# kappa2 = " << format_number(c.kappa2) << '\n'
      << "# kappa3 = " << format_number(c.kappa3) << '\n'
      << "# kappa4 = " << format_number(c.kappa4) << '\n';
  for (const std::string& w : warnings) out << "# warning: " << w << '\n';
}

Scenario load(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  return load_scenario(g.config);
}

std::vector<double> parse_grid(const std::string& spec) {
  // "min:max:count" or "v1,v2,..."
  std::vector<double> values;
  auto to_double = [](const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("not a number in grid: '" + s + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("grid must be min:max:count");
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double count = to_double(parts[2]);
    if (count < 2 || count != std::floor(count)) throw ConfigError("grid count must be an integer >= 2");
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      values.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) values.push_back(to_double(part));
  }
  if (values.empty()) throw ConfigError("empty grid");
  return values;
}

// strategy ------------------------------------------------------------------

struct StrategyArgs {
  double t = 0.0;
  double x = 1.0;
  double s = NAN;
  double wealth = NAN;
  double xi = NAN;
};

int cmd_strategy(const Globals& g, const StrategyArgs& a, std::ostream& out) {
  const Scenario sc = load(g);
  const ValidationReport report = validate(sc.market, sc.jump);
  const DerivedCoefficients c = derive(sc.market, sc.jump);
  const double theta = sc.preference.theta;
  const double s = std::isnan(a.s) ? a.t : a.s;
  const double wealth = std::isnan(a.wealth) ? a.x : a.wealth;

  write_preamble(out, c, report.warnings);
  Csv csv(out);
  csv.header({"strategy", "pi", "L"});
  const Controls tc = tc_control(c, theta, a.t, s);
  csv.row("time_consistent", {tc.pi, tc.L});
  if (a.t < sc.market.T) {
    const Controls pre = pre_control(c, theta, a.t, a.x, s, wealth);
    csv.row("precommitment", {pre.pi, pre.L});
  }
  const SpecialCases sp = special_cases(c, theta, a.t, a.x, a.x, s);
  csv.row("no_investment", {0.0, sp.no_investment.control});
  csv.row("no_insurance", {sp.no_insurance.control, 0.0});
  if (!std::isnan(a.xi)) {
    const Controls aux = aux_control(c, a.xi, s, wealth);
    csv.row("quadratic_loss", {aux.pi, aux.L});
  }
  return kExitOk;
}

// frontier ------------------------------------------------------------------

struct FrontierArgs {
  double t = 0.0;
  double x = 1.0;
  double s = NAN;
  std::string means;
  std::string thetas;
};

int cmd_frontier(const Globals& g, const FrontierArgs& a, std::ostream& out) {
  const Scenario sc = load(g);
  const DerivedCoefficients c = derive(sc.market, sc.jump);
  const double s = std::isnan(a.s) ? sc.market.T : a.s;
  if (!a.means.empty() == !a.thetas.empty()) throw ConfigError("give exactly one of --means or --thetas");

  std::vector<double> means;
  if (!a.means.empty()) {
    means = parse_grid(a.means);
  } else {
    for (double theta : parse_grid(a.thetas)) means.push_back(tc_frontier_point(c, theta, a.t, a.x, s).mean);
  }
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (!(means[i] > means[i - 1])) throw ConfigError("frontier grid must be strictly ascending");
  }

  Csv csv(out);
  csv.header({"mean", "variance_tc", "variance_pre", "sml_slope"});
  const double slope = sml_slope(c, a.t, s);
  for (double m : means) {
    csv.row({m, tc_frontier_variance(c, a.t, a.x, s, m), pre_frontier_variance(c, a.t, a.x, s, m), slope});
  }
  return kExitOk;
}

// sweep ---------------------------------------------------------------------

struct SweepArgs {
  std::string parameter;
  std::string grid;
  std::string thetas;
  double loading = NAN;
  bool with_pre = false;
  double t = 0.0;
  double x = 1.0;
};

void set_parameter(Scenario& sc, const std::string& name, double v) {
  MarketParams& m = sc.market;
  if (name == "r") m.r = v;
  else if (name == "mu") m.mu = v;
  else if (name == "sigma") m.sigma = v;
  else if (name == "alpha") m.alpha = v;
  else if (name == "beta") m.beta = v;
  else if (name == "rho") m.rho = v;
  else if (name == "lambda") m.lambda = v;
  else if (name == "p") m.p = v;
  else if (name == "T") m.T = v;
  else if (name == "gamma") sc.jump = JumpDistribution::make(sc.jump.kind(), v, sc.jump.param2());
  else throw ConfigError("cannot sweep '" + name + "'");
}

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  const Scenario base = load(g);
  const std::vector<double> grid = parse_grid(a.grid);
  if (grid.size() < 2) throw ConfigError("sweep grid needs at least two points");
  const bool ev_premium = !std::isnan(a.loading);
  if (ev_premium && a.parameter == "p") throw ConfigError("cannot sweep p under the expected-value premium rule");
  const std::vector<double> thetas = a.thetas.empty() ? std::vector<double>{base.preference.theta} : parse_grid(a.thetas);

  std::vector<std::string> header{a.parameter, "p"};
  for (double th : thetas) {
    header.push_back("pi_theta_" + format_number(th));
    header.push_back("L_theta_" + format_number(th));
  }
  if (a.with_pre) {
    for (double th : thetas) {
      header.push_back("pre_pi_theta_" + format_number(th));
      header.push_back("pre_L_theta_" + format_number(th));
    }
  }
  std::ostringstream body;
  Csv csv(body);
  csv.header(header);
  for (double v : grid) {
    Scenario sc = base;
    set_parameter(sc, a.parameter, v);
    if (ev_premium) sc.market.p = (1.0 + a.loading) * (sc.market.alpha + sc.market.lambda * sc.jump.moments().first);
    try {
      validate(sc.market, sc.jump);
    } catch (const std::exception& e) {
      throw DomainError(a.parameter + " = " + format_number(v) + ": " + e.what());
    }
    const DerivedCoefficients c = derive(sc.market, sc.jump);
    std::vector<double> row{v, sc.market.p};
    for (double th : thetas) {
      const Controls u = tc_control(c, th, a.t, a.t);
      row.push_back(u.pi);
      row.push_back(u.L);
    }
    if (a.with_pre) {
      for (double th : thetas) {
        const Controls u = pre_control(c, th, a.t, a.x, a.t, a.x);
        row.push_back(u.pi);
        row.push_back(u.L);
      }
    }
    csv.row(row);
  }
  out << body.str();
  return kExitOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string strategy = "tc";
  std::size_t paths = SimulationConfig{}.n_paths;
  std::size_t steps_per_year = SimulationConfig{}.steps_per_year;
  bool antithetic = false;
  unsigned threads = 0;
  double xi = NAN;
  double t = 0.0;
  double x = 1.0;
  std::string dump;
};

struct ReportRow {
  std::string name;
  Estimate estimate;
  double reference;
  double allowance;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  const Scenario sc = load(g);
  const ValidationReport warnings = validate(sc.market, sc.jump);
  const DerivedCoefficients c = derive(sc.market, sc.jump);
  const double theta = sc.preference.theta;
  const double T = sc.market.T;
  const double tau = T - a.t;

  SimulationConfig cfg;
  cfg.n_paths = a.paths;
  cfg.steps_per_year = a.steps_per_year;
  cfg.seed = g.seed;
  cfg.antithetic = a.antithetic;
  cfg.threads = a.threads;
  validate(cfg);

  std::unique_ptr<Strategy> strategy;
  if (a.strategy == "tc") strategy = std::make_unique<Strategy>(Strategy::time_consistent(c, theta, a.t));
  else if (a.strategy == "pre") strategy = std::make_unique<Strategy>(Strategy::precommit(c, theta, a.t, a.x));
  else if (a.strategy == "zero") strategy = std::make_unique<Strategy>(Strategy::zero(c, a.t));
  else if (a.strategy == "aux") {
    if (std::isnan(a.xi)) throw ConfigError("--xi is required for the aux strategy");
    strategy = std::make_unique<Strategy>(Strategy::aux_quadratic(c, a.xi, a.t));
  } else {
    throw ConfigError("unknown strategy '" + a.strategy + "' (expected tc, pre, zero or aux)");
  }

  const TerminalSamples samples = simulate_wealth(sc.market, sc.jump, *strategy, cfg, a.t, a.x);
  if (!a.dump.empty()) {
    std::ofstream dump(a.dump);
    if (!dump) throw ConfigError("cannot open dump file '" + a.dump + "'");
    write_samples(dump, samples);
  }

  // Euler compounds the riskless part as (1 + r dt)^n rather than e^{r tau};
  // the mean band is widened by exactly that deterministic gap.
  const double dt = tau / static_cast<double>(samples.n_steps);
  const double bond_gap =
      std::abs(a.x) * std::abs(std::exp(sc.market.r * tau) - std::pow(1.0 + sc.market.r * dt, samples.n_steps));

  std::vector<ReportRow> rows;
  if (a.strategy == "aux") {
    rows.push_back({"quadratic_loss", estimate_quadratic_loss(samples, a.xi), aux_value(c, a.xi, a.t, a.x), 0.0});
  } else {
    const double aux_y = strategy->wealth_affine() ? NAN : auxiliary_Y(sc.market, sc.jump, *strategy, a.t, a.x, T);
    const ObjectiveEstimates est = estimate_objectives(samples, theta, std::isnan(aux_y) ? 0.0 : aux_y);
    Moments ref{};
    double objective_ref = NAN;
    if (a.strategy == "tc") {
      ref = tc_moments(c, theta, a.t, a.x, T);
      objective_ref = ref.mean - 0.5 * theta * ref.variance;
    } else if (a.strategy == "pre") {
      ref = pre_moments(c, theta, a.t, a.x);
      objective_ref = pre_value(c, theta, a.t, a.x);
    } else {
      ref = {a.x * std::exp(sc.market.r * tau), 0.0};
      objective_ref = ref.mean;
    }
    rows.push_back({"mean", est.stats.mean, ref.mean, bond_gap});
    rows.push_back({"variance", est.stats.variance, ref.variance, 0.0});
    rows.push_back({"objective", est.stats.objective, objective_ref, bond_gap});
    if (a.strategy == "tc") {
      rows.push_back({"modified_objective", est.modified, tc_value(c, theta, a.t, a.x, a.x), bond_gap});
    }
  }

  out << "# strategy = " << to_string(strategy->kind()) << '\n'
      << "# n_paths = " << cfg.n_paths << '\n'
      << "# n_steps = " << samples.n_steps << '\n'
      << "# seed = " << cfg.seed << '\n'
      << "# antithetic = " << (cfg.antithetic ? "true" : "false") << '\n';
  for (const std::string& w : warnings.warnings) out << "# warning: " << w << '\n';
  Csv csv(out);
  csv.header({"statistic", "estimate", "se", "reference", "allowance", "z", "pass"});
  bool all = true;
  for (const ReportRow& r : rows) {
    const double gap = std::abs(r.estimate.value - r.reference);
    const bool pass = gap <= 3.0 * r.estimate.se + r.allowance + 1e-12 * std::max(1.0, std::abs(r.reference));
    const double z = r.estimate.se > 0.0 ? (r.estimate.value - r.reference) / r.estimate.se : 0.0;
    all = all && pass;
    csv.row_strings({r.name, format_number(r.estimate.value), format_number(r.estimate.se), format_number(r.reference),
                     format_number(r.allowance), format_fixed(z, 3), pass ? "pass" : "fail"});
  }
  out << "# overall = " << (all ? "pass" : "fail") << '\n';
  return all ? kExitOk : kExitVerification;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  bool json = false;
  bool skip_signs = false;
  std::size_t ode_steps = VerifyOptions{}.ode_steps;
};

int cmd_verify(const Globals& g, const VerifyArgs& a, std::ostream& out) {
  const Scenario sc = load(g);
  VerifyOptions opts;
  opts.theta = sc.preference.theta;
  opts.include_signs = !a.skip_signs;
  opts.ode_steps = a.ode_steps;
  const VerificationReport report = run_verification(sc.market, sc.jump, opts);
  if (a.json) {
    write_report_json(out, report);
  } else {
    for (const std::string& w : report.warnings) out << "# warning: " << w << '\n';
    Csv csv(out);
    csv.header({"check", "observed", "tolerance", "result"});
    for (const Check& ch : report.checks) {
      csv.row_strings({ch.name, format_number(ch.observed), format_number(ch.tolerance), ch.pass ? "pass" : "fail"});
    }
    out << "# overall = " << (report.pass() ? "pass" : "fail") << '\n';
  }
  return report.pass() ? kExitOk : kExitVerification;
}

// compare -------------------------------------------------------------------

struct CompareArgs {
  double t = 0.0;
  double x = 1.0;
  double target = NAN;
};

int cmd_compare(const Globals& g, const CompareArgs& a, std::ostream& out) {
  const Scenario sc = load(g);
  const DerivedCoefficients c = derive(sc.market, sc.jump);
  const double theta = sc.preference.theta;
  const Moments tc = tc_moments(c, theta, a.t, a.x, sc.market.T);
  const Moments pre = pre_moments(c, theta, a.t, a.x);
  const double j_tc = tc.mean - 0.5 * theta * tc.variance;
  const double j_pre = pre.mean - 0.5 * theta * pre.variance;
  const double m = std::isnan(a.target) ? 0.5 * (tc.mean + pre.mean) : a.target;
  const TargetControls tgt = target_controls(c, m, a.t, a.x, a.t, a.x);

  out << "# theta = " << format_number(theta) << '\n' << "# target_mean = " << format_number(m) << '\n';
  Csv csv(out);
  csv.header({"quantity", "precommitment", "time_consistent", "holds"});
  auto line = [&](const std::string& name, double p, double q, bool holds) {
    csv.row_strings({name, format_number(p), format_number(q), holds ? "true" : "false"});
  };
  line("mean", pre.mean, tc.mean, pre.mean > tc.mean);
  line("variance", pre.variance, tc.variance, pre.variance > tc.variance);
  line("objective", j_pre, j_tc, j_pre > j_tc);
  line("target_pi", tgt.pre.pi, tgt.tc.pi, std::abs(tgt.pre.pi) > std::abs(tgt.tc.pi));
  line("target_L", tgt.pre.L, tgt.tc.L, std::abs(tgt.pre.L) > std::abs(tgt.tc.L));
  line("target_theta", tgt.theta_pre, tgt.theta_tc, tgt.theta_pre > tgt.theta_tc);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-variance investment and risk control for an insurer"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Scenario file");
  app.add_option("--out", g.out, "Write the table to this file instead of stdout");
  app.add_option("--seed", g.seed, "Root seed for simulations");

  std::function<int(std::ostream&)> action;

  StrategyArgs sa;
  auto* strategy = app.add_subcommand("strategy", "Optimal controls at time s and the kappa coefficients");
  strategy->add_option("--t", sa.t, "Evaluation start time");
  strategy->add_option("--x", sa.x, "Wealth at t");
  strategy->add_option("--s", sa.s, "Time of the controls (default t)");
  strategy->add_option("--wealth", sa.wealth, "Wealth at s for wealth-dependent rules (default x)");
  strategy->add_option("--xi", sa.xi, "Also print the quadratic-loss controls for this target");
  strategy->callback([&] { action = [&](std::ostream& o) { return cmd_strategy(g, sa, o); }; });

  FrontierArgs fa;
  auto* frontier = app.add_subcommand("frontier", "Time-consistent and precommitment frontiers");
  frontier->add_option("--t", fa.t, "Start time");
  frontier->add_option("--x", fa.x, "Wealth at t");
  frontier->add_option("--s", fa.s, "Frontier time (default T)");
  frontier->add_option("--means", fa.means, "Mean grid: min:max:count or a comma list");
  frontier->add_option("--thetas", fa.thetas, "Risk-aversion grid mapped to time-consistent means");
  frontier->callback([&] { action = [&](std::ostream& o) { return cmd_frontier(g, fa, o); }; });

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Controls along a one-parameter grid");
  sweep->add_option("--param", wa.parameter, "r, mu, sigma, alpha, beta, rho, lambda, p, T or gamma")->required();
  sweep->add_option("--grid", wa.grid, "min:max:count or a comma list")->required();
  sweep->add_option("--thetas", wa.thetas, "Risk aversions (default: the config theta)");
  sweep->add_option("--loading", wa.loading, "Recompute p = (1 + loading)(alpha + lambda E[gamma]) at each point");
  sweep->add_flag("--with-pre", wa.with_pre, "Add precommitment controls at t");
  sweep->add_option("--t", wa.t, "Time of the controls");
  sweep->add_option("--x", wa.x, "Wealth at t");
  sweep->callback([&] { action = [&](std::ostream& o) { return cmd_sweep(g, wa, o); }; });

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check against the closed forms");
  simulate->add_option("--strategy", ma.strategy, "tc, pre, zero or aux");
  simulate->add_option("--paths", ma.paths, "Number of paths");
  simulate->add_option("--steps-per-year", ma.steps_per_year, "Euler steps per year");
  simulate->add_flag("--antithetic", ma.antithetic, "Antithetic pairs");
  simulate->add_option("--threads", ma.threads, "Worker threads (0: all cores)");
  simulate->add_option("--xi", ma.xi, "Target for the aux strategy");
  simulate->add_option("--t", ma.t, "Start time");
  simulate->add_option("--x", ma.x, "Initial wealth");
  simulate->add_option("--dump", ma.dump, "Write terminal wealth samples to this file");
  simulate->callback([&] { action = [&](std::ostream& o) { return cmd_simulate(g, ma, o); }; });

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run every consistency check for the scenario");
  verify->add_flag("--json", va.json, "JSON report");
  verify->add_flag("--skip-signs", va.skip_signs, "Leave out the comparative-statics sign table");
  verify->add_option("--ode-steps", va.ode_steps, "RK4 steps for the coefficient ODEs");
  verify->callback([&] { action = [&](std::ostream& o) { return cmd_verify(g, va, o); }; });

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Precommitment against time-consistent, side by side");
  compare->add_option("--t", ca.t, "Start time");
  compare->add_option("--x", ca.x, "Wealth at t");
  compare->add_option("--target", ca.target, "Common mean target (default: midpoint of the two means)");
  compare->callback([&] { action = [&](std::ostream& o) { return cmd_compare(g, ca, o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (g.out.empty()) return action(out);
    std::ostringstream buffer;
    const int code = action(buffer);
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + g.out + "'");
    file << buffer.str();
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DegenerateModel& e) {
    err << "degenerate model: " << e.what() << '\n';
    return kExitDomain;
  } catch (const InsufficientSamples& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace mvrc
