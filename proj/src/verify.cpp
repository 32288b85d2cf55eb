#include "mvrc/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "mvrc/errors.hpp"
#include "mvrc/format.hpp"

namespace mvrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Candidate value function A(t)(x-y)^2 + B(t)x + C(t) and its time
// derivatives, taken directly from the exponential closed forms.
struct Ansatz {
  double A, B, C, dA, dB, dC;
};

Ansatz candidate(const MarketParams& m, double kappa3, double theta, double t) {
  const double tau = m.T - t;
  const double g = std::exp(m.r * tau);
  Ansatz a{};
  a.A = -0.5 * theta * g * g;
  a.B = g;
  a.C = kappa3 / (2.0 * theta) * tau;
  a.dA = m.r * theta * g * g;
  a.dB = -m.r * g;
  a.dC = -kappa3 / (2.0 * theta);
  return a;
}

double supremand(const MarketParams& m, const JumpMoments& g, const Ansatz& a, double x, double y, Controls u) {
  const double mu_bar = m.mu - m.r;
  const double p_bar = m.p - m.alpha;
  const double gap = x - y;
  const double vx = 2.0 * a.A * gap + a.B;
  const double vy = -2.0 * a.A * gap;
  const double vxx = 2.0 * a.A;

  const double drift_x = m.r * x + mu_bar * u.pi + p_bar * u.L;
  const double drift_y = m.r * y + mu_bar * u.pi + (p_bar - m.lambda * g.first) * u.L;
  const double common = m.sigma * u.pi - m.rho * m.beta * u.L;
  const double diffusion = common * common + m.beta * m.beta * (1.0 - m.rho * m.rho) * u.L * u.L;
  // E[V(x - L gamma) - V(x)] is exact for a quadratic in x.
  const double jump = m.lambda * (a.A * (-2.0 * gap * u.L * g.first + u.L * u.L * g.second) - a.B * u.L * g.first);
  return drift_x * vx + 0.5 * diffusion * vxx + drift_y * vy + jump;
}

Controls candidate_controls(const DerivedCoefficients& c, double theta, double t) {
  return tc_control(c, theta, t, t);
}

// Sensitivity table ---------------------------------------------------------

struct Cell {
  const char* parameter;
  SignQuantity quantity;
  SignRegime regime;
  int sign;  // ignored for sign_of_rho
};

// Comparative statics as published, under p_bar > lambda g1 and mu_bar > 0.
constexpr std::array<Cell, 21> kPublishedSigns{{
    {"rho", SignQuantity::pi, SignRegime::rho_positive, +1},
    {"rho", SignQuantity::L, SignRegime::rho_positive, +1},
    {"rho", SignQuantity::value, SignRegime::rho_negative, -1},
    {"mu_bar", SignQuantity::pi, SignRegime::always, +1},
    {"mu_bar", SignQuantity::L, SignRegime::sign_of_rho, 0},
    {"mu_bar", SignQuantity::value, SignRegime::rho_negative, +1},
    {"sigma", SignQuantity::pi, SignRegime::rho_positive, -1},
    {"sigma", SignQuantity::L, SignRegime::sign_of_rho, 0},
    {"sigma", SignQuantity::value, SignRegime::rho_negative, +1},
    {"p_bar", SignQuantity::pi, SignRegime::sign_of_rho, 0},
    {"p_bar", SignQuantity::L, SignRegime::always, +1},
    {"p_bar", SignQuantity::value, SignRegime::rho_negative, -1},
    {"beta", SignQuantity::pi, SignRegime::rho_positive, +1},
    {"beta", SignQuantity::L, SignRegime::rho_zero, +1},
    {"beta", SignQuantity::value, SignRegime::rho_negative, -1},
    {"lambda", SignQuantity::pi, SignRegime::rho_positive, -1},
    {"lambda", SignQuantity::L, SignRegime::rho_positive, -1},
    {"lambda", SignQuantity::value, SignRegime::rho_positive, -1},
    {"gamma", SignQuantity::pi, SignRegime::rho_positive, -1},
    {"gamma", SignQuantity::L, SignRegime::rho_positive, -1},
    {"gamma", SignQuantity::value, SignRegime::rho_positive, -1},
}};

struct Scenario {
  MarketParams market;
  JumpDistribution jump;
};

/// Applies an additive shift to one table parameter.
Scenario shifted(const Scenario& base, const std::string& name, double h) {
  Scenario out = base;
  MarketParams& m = out.market;
  if (name == "rho") {
    m.rho += h;
    if (m.rho < -1.0 || m.rho > 1.0) throw DomainError("rho bump leaves [-1, 1]");
  } else if (name == "mu_bar") {
    m.mu += h;
  } else if (name == "sigma") {
    m.sigma += h;
    if (!(m.sigma > 0.0)) throw DomainError("sigma bump leaves (0, inf)");
  } else if (name == "p_bar") {
    m.p += h;
  } else if (name == "beta") {
    m.beta += h;
    if (m.beta < 0.0) throw DomainError("beta bump leaves [0, inf)");
  } else if (name == "lambda") {
    m.lambda += h;
    if (m.lambda < 0.0) throw DomainError("lambda bump leaves [0, inf)");
  } else if (name == "gamma") {
    out.jump = JumpDistribution::constant(base.jump.param1() + h);
  }
  return out;
}

double table_value(const Scenario& s, const std::string& name) {
  const MarketParams& m = s.market;
  if (name == "rho") return m.rho;
  if (name == "mu_bar") return m.mu - m.r;
  if (name == "sigma") return m.sigma;
  if (name == "p_bar") return m.p - m.alpha;
  if (name == "beta") return m.beta;
  if (name == "lambda") return m.lambda;
  return s.jump.param1();
}

std::array<double, 3> table_quantities(const Scenario& s, double theta, double t, double x) {
  const DerivedCoefficients c = derive(s.market, s.jump);
  const Controls u = tc_control(c, theta, t, t);
  return {u.pi, u.L, tc_value(c, theta, t, x, x)};
}

// Sweep helpers -------------------------------------------------------------

double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double grid_argmin(const std::function<double(double)>& f, double lo, double hi, std::size_t grid) {
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + step * static_cast<double>(std::min(grid - 1, best + 1));
  return golden_section_min(f, a, b, 1e-10);
}

MarketParams with_rho(MarketParams m, double rho) {
  m.rho = std::clamp(rho, -1.0, 1.0);
  return m;
}

Controls strategy_at_start(const MarketParams& m, const JumpDistribution& jump, double theta) {
  return tc_control(derive(m, jump), theta, 0.0, 0.0);
}

Check make_check(std::string name, double observed, double tolerance, bool pass, std::string detail = {}) {
  return Check{std::move(name), observed, tolerance, pass, std::move(detail)};
}

bool matches_reference(const MarketParams& m, const JumpDistribution& jump) {
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  return jump.kind() == JumpKind::constant && same(jump.param1(), 0.3) && same(m.r, 0.01) && same(m.mu, 0.05) &&
         same(m.sigma, 0.25) && same(m.alpha, 0.08) && same(m.beta, 0.1) && same(m.lambda, 0.1) && same(m.p, 0.15);
}

}  // namespace

// ODE oracle ----------------------------------------------------------------

OdeSolution integrate_ansatz(const MarketParams& params, const JumpDistribution& jump, double theta,
                             std::size_t grid_size) {
  validate(Preference{theta});
  if (grid_size == 0) throw DomainError("grid_size must be positive");
  const double kappa3 = derive(params, jump).kappa3;
  const double r = params.r;

  struct State {
    double A, B, C;
  };
  auto rhs = [&](const State& s) { return State{-2.0 * r * s.A, -r * s.B, kappa3 * s.B * s.B / (4.0 * s.A)}; };
  auto axpy = [](const State& s, double h, const State& k) {
    return State{s.A + h * k.A, s.B + h * k.B, s.C + h * k.C};
  };

  OdeSolution sol;
  const std::size_t n = grid_size;
  sol.t.resize(n + 1);
  sol.A.resize(n + 1);
  sol.B.resize(n + 1);
  sol.C.resize(n + 1);

  const double h = -params.T / static_cast<double>(n);  // backward in time
  State s{-0.5 * theta, 1.0, 0.0};
  sol.t[n] = params.T;
  sol.A[n] = s.A;
  sol.B[n] = s.B;
  sol.C[n] = s.C;
  for (std::size_t k = n; k > 0; --k) {
    const State k1 = rhs(s);
    const State k2 = rhs(axpy(s, 0.5 * h, k1));
    const State k3 = rhs(axpy(s, 0.5 * h, k2));
    const State k4 = rhs(axpy(s, h, k3));
    s.A += h / 6.0 * (k1.A + 2.0 * k2.A + 2.0 * k3.A + k4.A);
    s.B += h / 6.0 * (k1.B + 2.0 * k2.B + 2.0 * k3.B + k4.B);
    s.C += h / 6.0 * (k1.C + 2.0 * k2.C + 2.0 * k3.C + k4.C);
    sol.t[k - 1] = params.T * static_cast<double>(k - 1) / static_cast<double>(n);
    sol.A[k - 1] = s.A;
    sol.B[k - 1] = s.B;
    sol.C[k - 1] = s.C;
  }
  return sol;
}

double AnsatzDeviation::max() const { return std::max({A, B, C}); }

AnsatzDeviation ansatz_deviation(const OdeSolution& sol, const MarketParams& params, const JumpDistribution& jump,
                                 double theta) {
  const double kappa3 = derive(params, jump).kappa3;
  AnsatzDeviation dev;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const Ansatz a = candidate(params, kappa3, theta, sol.t[i]);
    dev.A = std::max(dev.A, std::abs(sol.A[i] - a.A));
    dev.B = std::max(dev.B, std::abs(sol.B[i] - a.B));
    dev.C = std::max(dev.C, std::abs(sol.C[i] - a.C));
  }
  return dev;
}

double ansatz_value(const OdeSolution& sol, double t, double x, double y) {
  if (sol.t.empty() || t < sol.t.front() || t > sol.t.back()) throw DomainError("t outside the ODE grid");
  auto it = std::lower_bound(sol.t.begin(), sol.t.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - sol.t.begin());
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w = sol.t[hi] == sol.t[lo] ? 0.0 : (t - sol.t[lo]) / (sol.t[hi] - sol.t[lo]);
  auto lerp = [&](const std::vector<double>& v) { return v[lo] + w * (v[hi] - v[lo]); };
  const double gap = x - y;
  return lerp(sol.A) * gap * gap + lerp(sol.B) * x + lerp(sol.C);
}

// HJB -----------------------------------------------------------------------

double hjb_supremand(const MarketParams& params, const JumpDistribution& jump, double theta, double t, double x,
                     double y, Controls u) {
  const DerivedCoefficients c = derive(params, jump);
  return supremand(params, jump.moments(), candidate(params, c.kappa3, theta, t), x, y, u);
}

double hjb_residual(const MarketParams& params, const JumpDistribution& jump, double theta, double t, double x,
                    double y) {
  validate(Preference{theta});
  if (!(t <= params.T)) throw DomainError("t must not exceed T");
  const DerivedCoefficients c = derive(params, jump);
  const Ansatz a = candidate(params, c.kappa3, theta, t);
  const double gap = x - y;
  const double vt = a.dA * gap * gap + a.dB * x + a.dC;
  return vt + supremand(params, jump.moments(), a, x, y, candidate_controls(c, theta, t));
}

// Sensitivities -------------------------------------------------------------

std::string to_string(SignQuantity q) {
  switch (q) {
    case SignQuantity::pi:
      return "pi";
    case SignQuantity::L:
      return "L";
    case SignQuantity::value:
      return "value";
  }
  return "unknown";
}

std::vector<SignReport> sensitivity_signs(const MarketParams& params, const JumpDistribution& jump, double theta,
                                          double t, double x, double bump) {
  validate(Preference{theta});
  if (!(bump > 0.0)) throw DomainError("bump must be positive");
  const Scenario base{params, jump};

  std::vector<std::string> names{"rho", "mu_bar", "sigma", "p_bar", "beta", "lambda"};
  if (jump.kind() == JumpKind::constant) names.emplace_back("gamma");

  std::vector<SignReport> out;
  for (const std::string& name : names) {
    const double v = table_value(base, name);
    const double h = v != 0.0 ? bump * std::abs(v) : bump;
    const auto up = table_quantities(shifted(base, name, h), theta, t, x);
    const auto down = table_quantities(shifted(base, name, -h), theta, t, x);

    for (int qi = 0; qi < 3; ++qi) {
      SignReport rep;
      rep.parameter = name;
      rep.quantity = static_cast<SignQuantity>(qi);
      rep.rho = params.rho;
      const double diff = up[qi] - down[qi];
      rep.derivative = diff / (2.0 * h);
      const double noise = 1e-12 * std::max(std::abs(up[qi]), std::abs(down[qi]));
      rep.observed_sign = std::abs(diff) <= noise ? 0 : sign_of(diff);

      for (const Cell& cell : kPublishedSigns) {
        if (name != cell.parameter || cell.quantity != rep.quantity) continue;
        switch (cell.regime) {
          case SignRegime::always:
            rep.constrained = true;
            rep.expected_sign = cell.sign;
            break;
          case SignRegime::rho_negative:
            rep.constrained = params.rho < 0.0;
            rep.expected_sign = cell.sign;
            break;
          case SignRegime::rho_zero:
            rep.constrained = params.rho == 0.0;
            rep.expected_sign = cell.sign;
            break;
          case SignRegime::rho_positive:
            rep.constrained = params.rho > 0.0;
            rep.expected_sign = cell.sign;
            break;
          case SignRegime::sign_of_rho:
            rep.constrained = true;
            rep.expected_sign = sign_of(params.rho);
            break;
        }
      }
      if (!rep.constrained) rep.expected_sign = 0;
      rep.agree = !rep.constrained || rep.observed_sign == rep.expected_sign;
      out.push_back(rep);
    }
  }
  return out;
}

// Sweeps -------------------------------------------------------------------

double kappa1_root(const MarketParams& base, const JumpDistribution& jump) {
  auto k1 = [&](double rho) { return derive(with_rho(base, rho), jump).kappa1; };
  double lo = -1.0;
  double hi = 0.0;
  double flo = k1(lo);
  const double fhi = k1(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (sign_of(flo) == sign_of(fhi)) return kNaN;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = k1(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double liability_argmin(const MarketParams& base, const JumpDistribution& jump, std::size_t grid) {
  auto f = [&](double rho) { return strategy_at_start(with_rho(base, rho), jump, 1.0).L; };
  return grid_argmin(f, -1.0, 1.0, grid);
}

bool FigureReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

FigureReport figure_checks(const MarketParams& base, const JumpDistribution& jump) {
  FigureReport report;
  const std::array<double, 4> thetas{1.0, 2.0, 5.0, 10.0};
  constexpr std::size_t kGrid = 401;

  std::vector<double> rhos(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) rhos[i] = -1.0 + 2.0 * static_cast<double>(i) / (kGrid - 1);

  // [theta][rho]
  std::vector<std::vector<Controls>> curves(thetas.size(), std::vector<Controls>(kGrid));
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    for (std::size_t i = 0; i < kGrid; ++i) curves[j][i] = strategy_at_start(with_rho(base, rhos[i]), jump, thetas[j]);
  }

  double min_step = std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    for (std::size_t i = 1; i < kGrid; ++i) min_step = std::min(min_step, curve[i].pi - curve[i - 1].pi);
  }
  report.checks.push_back(make_check("rho_sweep.pi_increasing_in_rho", min_step, 0.0, min_step > 0.0,
                                     "smallest grid increment of pi*(rho) over theta in {1,2,5,10}"));

  report.kappa1_root = kappa1_root(base, jump);
  {
    bool ok = std::isfinite(report.kappa1_root);
    double worst = 0.0;
    if (ok) {
      for (std::size_t j = 0; j < thetas.size(); ++j) {
        const double at_root = strategy_at_start(with_rho(base, report.kappa1_root), jump, thetas[j]).pi;
        const double scale = std::abs(curves[j].front().pi) + std::abs(curves[j].back().pi);
        worst = std::max(worst, std::abs(at_root) / scale);
        // Sign change must sit in the grid cell containing the root.
        for (std::size_t i = 1; i < kGrid; ++i) {
          const bool crosses = sign_of(curves[j][i - 1].pi) != sign_of(curves[j][i].pi);
          const bool holds_root = rhos[i - 1] <= report.kappa1_root && report.kappa1_root <= rhos[i];
          if (crosses && !holds_root) ok = false;
        }
      }
    }
    ok = ok && worst <= 1e-12;
    report.checks.push_back(make_check("rho_sweep.pi_common_zero_crossing", report.kappa1_root, 1e-12, ok,
                                       "root of kappa1 in rho; every theta-curve crosses zero there"));
  }

  {
    std::vector<double> argmins;
    for (double theta : thetas) {
      auto f = [&](double rho) { return strategy_at_start(with_rho(base, rho), jump, theta).L; };
      argmins.push_back(grid_argmin(f, -1.0, 1.0, kGrid));
    }
    const auto [lo, hi] = std::minmax_element(argmins.begin(), argmins.end());
    report.liability_argmin = argmins[1];
    report.checks.push_back(make_check("rho_sweep.L_argmin_theta_independent", *hi - *lo, 1e-6, *hi - *lo <= 1e-6,
                                       "spread of argmin_rho L*(rho) across theta"));
    if (matches_reference(base, jump)) {
      const double expected = -0.4143;
      const double err = std::abs(report.liability_argmin - expected);
      report.checks.push_back(make_check("rho_sweep.L_argmin_location", report.liability_argmin, 0.001, err <= 0.001,
                                         "published minimiser -0.4143 for the default parameters"));
    }
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kGrid; ++i) {
      for (std::size_t j = 1; j < thetas.size(); ++j) worst = std::min(worst, curves[j - 1][i].L - curves[j][i].L);
    }
    report.checks.push_back(make_check("rho_sweep.L_decreasing_in_theta", worst, 0.0, worst > 0.0,
                                       "smallest pointwise gap L*(theta_k) - L*(theta_k+1)"));
  }

  // lambda sweep: lambda in [0, 0.2], premium by expected value principle, theta = 2.
  constexpr std::size_t kLambdaGrid = 201;
  constexpr double kLoading = 0.4;
  const double g1 = jump.moments().first;
  auto lambda_point = [&](double rho, double lambda) {
    MarketParams m = with_rho(base, rho);
    m.lambda = lambda;
    m.p = (1.0 + kLoading) * (m.alpha + lambda * g1);
    return strategy_at_start(m, jump, 2.0);
  };
  for (double rho : {-0.5, 0.0, 0.5}) {
    std::vector<Controls> path(kLambdaGrid);
    for (std::size_t i = 0; i < kLambdaGrid; ++i) path[i] = lambda_point(rho, 0.2 * static_cast<double>(i) / (kLambdaGrid - 1));
    double l_step = -std::numeric_limits<double>::infinity();
    double pi_min = std::numeric_limits<double>::infinity();
    double pi_max = -std::numeric_limits<double>::infinity();
    double pi_lo = pi_min;
    double pi_hi = pi_max;
    for (std::size_t i = 1; i < kLambdaGrid; ++i) {
      l_step = std::max(l_step, path[i].L - path[i - 1].L);
      const double d = path[i].pi - path[i - 1].pi;
      pi_lo = std::min(pi_lo, d);
      pi_hi = std::max(pi_hi, d);
    }
    for (const Controls& u : path) {
      pi_min = std::min(pi_min, u.pi);
      pi_max = std::max(pi_max, u.pi);
    }
    const std::string tag = "rho=" + format_number(rho);
    report.checks.push_back(make_check("lambda_sweep.L_decreasing_in_lambda " + tag, l_step, 0.0, l_step < 0.0,
                                       "largest grid increment of L*(lambda)"));
    if (rho > 0.0) {
      report.checks.push_back(make_check("lambda_sweep.pi_decreasing_in_lambda " + tag, pi_hi, 0.0, pi_hi < 0.0,
                                         "largest grid increment of pi*(lambda)"));
    } else if (rho < 0.0) {
      report.checks.push_back(make_check("lambda_sweep.pi_increasing_in_lambda " + tag, pi_lo, 0.0, pi_lo > 0.0,
                                         "smallest grid increment of pi*(lambda)"));
    } else {
      const double spread = (pi_max - pi_min) / std::abs(pi_max);
      const double merton = (base.mu - base.r) / (2.0 * base.sigma * base.sigma) * std::exp(-base.r * base.T);
      const bool ok = spread <= 1e-12 && relative_gap(pi_max, merton) <= 1e-12;
      report.checks.push_back(make_check("lambda_sweep.pi_constant_in_lambda " + tag, spread, 1e-12, ok,
                                         "relative spread of pi*(lambda); equals the Merton ratio"));
    }
  }
  return report;
}

// Full run ------------------------------------------------------------------

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

VerificationReport run_verification(const MarketParams& params, const JumpDistribution& jump,
                                    const VerifyOptions& options) {
  VerificationReport report;
  report.warnings = validate(params, jump).warnings;
  validate(Preference{options.theta});
  const double theta = options.theta;
  const DerivedCoefficients c = derive(params, jump);
  const double T = params.T;

  {
    const Kappa3Forms k = kappa3_forms(params, jump.moments());
    const double gap = relative_gap(k.expanded, k.completed_square);
    report.checks.push_back(make_check("kappa3.two_forms", gap, 1e-12, gap <= 1e-12));

    const double linear = c.mu_bar * c.kappa1 + c.net_premium * c.kappa2;
    const double w1 = params.sigma * c.kappa1 - params.rho * params.beta * c.kappa2;
    const double quadratic = w1 * w1 + c.jump_variance * c.kappa2 * c.kappa2;
    const double g = std::max(relative_gap(linear, c.kappa3), relative_gap(quadratic, c.kappa3));
    report.checks.push_back(make_check("kappa3.identity", g, 1e-12, g <= 1e-12,
                                       "mu_bar k1 + (p_bar - lambda g1) k2 and the variance form both equal k3"));
  }

  {
    const OdeSolution sol = integrate_ansatz(params, jump, theta, options.ode_steps);
    const double dev = ansatz_deviation(sol, params, jump, theta).max();
    report.checks.push_back(make_check("ode.closed_form_sup_norm", dev, 1e-8, dev < 1e-8));

    double worst = 0.0;
    for (std::size_t i = 0; i < sol.t.size(); i += std::max<std::size_t>(1, sol.t.size() / 8)) {
      for (double x : {-1.0, 0.0, 1.0, 2.0}) {
        for (double y : {0.0, 1.0, 1.5}) {
          worst = std::max(worst, std::abs(ansatz_value(sol, sol.t[i], x, y) - tc_value(c, theta, sol.t[i], x, y)));
        }
      }
    }
    report.checks.push_back(make_check("ode.value_reconstruction", worst, 1e-8, worst < 1e-8));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double t = T * static_cast<double>(i) / 5.0;
      for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 5; ++k) {
          const double x = 0.5 * j;
          const double y = 0.5 * k;
          worst = std::max(worst, std::abs(hjb_residual(params, jump, theta, t, x, y)));
        }
      }
    }
    report.checks.push_back(make_check("hjb.residual_max", worst, 1e-10, worst < 1e-10, "5x5x5 (t,x,y) grid"));

    double terminal = 0.0;
    for (double x : {-1.0, 0.0, 1.0, 2.0}) {
      for (double y : {0.0, 1.0}) {
        terminal = std::max(terminal, std::abs(tc_value(c, theta, T, x, y) - (x - 0.5 * theta * (x - y) * (x - y))));
      }
    }
    report.checks.push_back(make_check("hjb.terminal_condition", terminal, 1e-12, terminal <= 1e-12));

    double best_gain = -std::numeric_limits<double>::infinity();
    const Controls star = tc_control(c, theta, 0.0, 0.0);
    const double at_star = hjb_supremand(params, jump, theta, 0.0, 1.0, 1.0, star);
    for (const Controls du : {Controls{1e-4, 0.0}, Controls{-1e-4, 0.0}, Controls{0.0, 1e-4}, Controls{0.0, -1e-4}}) {
      const double v = hjb_supremand(params, jump, theta, 0.0, 1.0, 1.0, {star.pi + du.pi, star.L + du.L});
      best_gain = std::max(best_gain, v - at_star);
    }
    report.checks.push_back(make_check("hjb.controls_maximise", best_gain, 0.0, best_gain < 0.0,
                                       "largest supremand gain from a 1e-4 perturbation"));
  }

  if (T > 0.0) {
    const Moments tc = tc_moments(c, theta, 0.0, 1.0, T);
    const Moments pre = pre_moments(c, theta, 0.0, 1.0);
    const double frontier = relative_gap(tc.variance, tc_frontier_variance(c, 0.0, 1.0, T, tc.mean));
    report.checks.push_back(make_check("frontier.time_consistent", frontier, 1e-12, frontier <= 1e-12));
    const double pre_front = relative_gap(pre.variance, pre_frontier_variance(c, 0.0, 1.0, T, pre.mean));
    report.checks.push_back(make_check("frontier.precommitment", pre_front, 1e-12, pre_front <= 1e-12));

    const double j_tc = tc.mean - 0.5 * theta * tc.variance;
    const double j_pre = pre.mean - 0.5 * theta * pre.variance;
    const bool dominance = pre.mean > tc.mean && pre.variance > tc.variance && j_pre > j_tc;
    report.checks.push_back(make_check("compare.precommit_dominates", j_pre - j_tc, 0.0, dominance,
                                       "pre mean, variance and J all exceed the time-consistent ones"));

    const double m = 0.5 * (tc.mean + pre.mean);
    const TargetControls tgt = target_controls(c, m, 0.0, 1.0, 0.0, 1.0);
    const bool riskier = std::abs(tgt.pre.pi) > std::abs(tgt.tc.pi) && std::abs(tgt.pre.L) > std::abs(tgt.tc.L);
    report.checks.push_back(make_check("compare.target_precommit_riskier", tgt.theta_pre / tgt.theta_tc, 1.0, riskier,
                                       "|pre| > |tc| controls at t for a common mean target"));

    const SpecialCases sc = special_cases(c, theta, 0.0, 1.0, 1.0, 0.0);
    const bool losses = sc.no_investment.loss >= 0.0 && sc.no_insurance.loss >= 0.0;
    report.checks.push_back(make_check("corollary.losses_nonnegative",
                                       std::min(sc.no_investment.loss, sc.no_insurance.loss), 0.0, losses));
  }

  const bool economic = c.net_premium > 0.0 && c.mu_bar > 0.0;
  if (matches_reference(params, jump)) {
    for (const Check& ch : figure_checks(params, jump).checks) report.checks.push_back(ch);
  }
  if (options.include_signs && economic) {
    std::vector<double> regimes{params.rho};
    for (double rho : {-0.5, 0.5}) {
      if (rho != params.rho) regimes.push_back(rho);
    }
    for (double rho : regimes) {
      MarketParams m = params;
      m.rho = rho;
      for (const SignReport& s : sensitivity_signs(m, jump, theta, 0.0, 1.0)) {
        if (!s.constrained) continue;
        const std::string name = "signs.d" + to_string(s.quantity) + "/d" + s.parameter + " rho=" + format_number(rho);
        report.checks.push_back(make_check(name, s.derivative, 0.0, s.agree,
                                           "expected sign " + std::to_string(s.expected_sign) + ", observed " +
                                               std::to_string(s.observed_sign)));
      }
    }
  }
  return report;
}

void write_report_json(std::ostream& out, const VerificationReport& report) {
  nlohmann::ordered_json doc;
  doc["pass"] = report.pass();
  doc["warnings"] = report.warnings;
  auto& checks = doc["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : report.checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["observed"] = std::isfinite(c.observed) ? nlohmann::ordered_json(c.observed) : nlohmann::ordered_json();
    item["tolerance"] = c.tolerance;
    item["pass"] = c.pass;
    if (!c.detail.empty()) item["detail"] = c.detail;
    checks.push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace mvrc
