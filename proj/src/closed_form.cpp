#include "mvrc/closed_form.hpp"

#include <cmath>

#include "mvrc/errors.hpp"

namespace mvrc {

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be positive");
}

void require_order(double t, double s, double T) {
  if (!(t <= s) || !(s <= T)) throw DomainError("times must satisfy t <= s <= T");
}

void require_before_horizon(double t, double T) {
  if (!(t <= T)) throw DomainError("t must not exceed the horizon T");
}

double discount(const DerivedCoefficients& c, double s) { return std::exp(-c.market.r * (c.market.T - s)); }

double growth(const DerivedCoefficients& c, double t, double s) { return std::exp(c.market.r * (s - t)); }

/// e^{kappa3 tau} - 1 without cancellation for small arguments.
double excess_growth(const DerivedCoefficients& c, double tau) { return std::expm1(c.kappa3 * tau); }

void require_admissible_target(const DerivedCoefficients& c, double m, double t, double x) {
  require_before_horizon(t, c.market.T);
  const double riskless = x * growth(c, t, c.market.T);
  if (!(m > riskless)) {
    throw DomainError("target mean must exceed the risk-free benchmark x e^{r(T-t)}");
  }
  if (!(c.market.T > t)) throw DomainError("mean targets need t < T");
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::TimeConsistent:
      return "time_consistent";
    case StrategyKind::Precommit:
      return "precommit";
    case StrategyKind::PrecommitTarget:
      return "precommit_target";
    case StrategyKind::TcTarget:
      return "tc_target";
    case StrategyKind::AuxQuadratic:
      return "aux_quadratic";
    case StrategyKind::NoInvestment:
      return "no_investment";
    case StrategyKind::NoInsurance:
      return "no_insurance";
    case StrategyKind::Zero:
      return "zero";
    case StrategyKind::Constant:
      return "constant";
  }
  return "unknown";
}

// Strategy ------------------------------------------------------------------

Strategy::Strategy(StrategyKind kind, Shape shape, const DerivedCoefficients& c, double t0)
    : kind_(kind), shape_(shape), r_(c.market.r), T_(c.market.T), t0_(t0) {
  if (!(t0 <= T_)) throw DomainError("strategy start must not exceed the horizon");
}

Strategy Strategy::time_consistent(const DerivedCoefficients& c, double theta, double t0) {
  require_theta(theta);
  Strategy out(StrategyKind::TimeConsistent, Shape::discounted, c, t0);
  out.a_ = c.kappa1 / theta;
  out.b_ = c.kappa2 / theta;
  return out;
}

Strategy Strategy::precommit(const DerivedCoefficients& c, double theta, double t0, double x0) {
  require_theta(theta);
  Strategy out(StrategyKind::Precommit, Shape::affine, c, t0);
  out.a_ = c.kappa1;
  out.b_ = c.kappa2;
  if (t0 < c.market.T) {
    out.xi_ = xi_star(c, m_star(c, theta, t0, x0), t0, x0);
  } else {
    out.xi_ = x0;
  }
  return out;
}

Strategy Strategy::precommit_target(const DerivedCoefficients& c, double m, double t0, double x0) {
  Strategy out(StrategyKind::PrecommitTarget, Shape::affine, c, t0);
  out.a_ = c.kappa1;
  out.b_ = c.kappa2;
  out.xi_ = xi_star(c, m, t0, x0);
  return out;
}

Strategy Strategy::tc_target(const DerivedCoefficients& c, double m, double t0, double x0) {
  const double theta = theta_tc_for_target(c, m, t0, x0);
  Strategy out(StrategyKind::TcTarget, Shape::discounted, c, t0);
  out.a_ = c.kappa1 / theta;
  out.b_ = c.kappa2 / theta;
  return out;
}

Strategy Strategy::aux_quadratic(const DerivedCoefficients& c, double xi, double t0) {
  Strategy out(StrategyKind::AuxQuadratic, Shape::affine, c, t0);
  out.a_ = c.kappa1;
  out.b_ = c.kappa2;
  out.xi_ = xi;
  return out;
}

Strategy Strategy::no_investment(const DerivedCoefficients& c, double theta, double t0) {
  require_theta(theta);
  const double b2 = c.market.beta * c.market.beta + c.market.lambda * c.gamma_bar2;
  if (!(b2 > 0.0)) throw DomainError("no-investment strategy needs beta > 0 or lambda > 0");
  Strategy out(StrategyKind::NoInvestment, Shape::discounted, c, t0);
  out.b_ = c.net_premium / (b2 * theta);
  return out;
}

Strategy Strategy::no_insurance(const DerivedCoefficients& c, double theta, double t0) {
  require_theta(theta);
  Strategy out(StrategyKind::NoInsurance, Shape::discounted, c, t0);
  out.a_ = c.mu_bar / (theta * c.market.sigma * c.market.sigma);
  return out;
}

Strategy Strategy::zero(const DerivedCoefficients& c, double t0) {
  return Strategy(StrategyKind::Zero, Shape::flat, c, t0);
}

Strategy Strategy::constant(const DerivedCoefficients& c, Controls u, double t0) {
  Strategy out(StrategyKind::Constant, Shape::flat, c, t0);
  out.a_ = u.pi;
  out.b_ = u.L;
  return out;
}

Strategy Strategy::scaled(double factor) const {
  Strategy out = *this;
  out.scale_ *= factor;
  return out;
}

void Strategy::check_time(double s) const {
  if (!(s >= t0_) || !(s <= T_)) throw DomainError("evaluation time outside [t0, T]");
}

Controls Strategy::at(double s, double wealth) const {
  check_time(s);
  switch (shape_) {
    case Shape::discounted: {
      const double d = std::exp(-r_ * (T_ - s));
      return {scale_ * a_ * d, scale_ * b_ * d};
    }
    case Shape::affine: {
      const double gap = wealth - xi_ * std::exp(-r_ * (T_ - s));
      return {-scale_ * a_ * gap, -scale_ * b_ * gap};
    }
    case Shape::flat:
      return {scale_ * a_, scale_ * b_};
  }
  return {};
}

Controls Strategy::deterministic_at(double s) const {
  if (shape_ == Shape::affine) {
    throw Unsupported("wealth-affine strategy has no deterministic control path");
  }
  return at(s, 0.0);
}

// Time-consistent -----------------------------------------------------------

Controls tc_control(const DerivedCoefficients& c, double theta, double t0, double s) {
  require_theta(theta);
  require_order(t0, s, c.market.T);
  const double d = discount(c, s);
  return {c.kappa1 / theta * d, c.kappa2 / theta * d};
}

double tc_value(const DerivedCoefficients& c, double theta, double t, double x, double y) {
  require_theta(theta);
  require_before_horizon(t, c.market.T);
  const double tau = c.market.T - t;
  const double g = std::exp(c.market.r * tau);
  const double gap = x - y;
  return -0.5 * theta * g * g * gap * gap + g * x + c.kappa3 / (2.0 * theta) * tau;
}

Moments tc_moments(const DerivedCoefficients& c, double theta, double t, double x, double s) {
  require_theta(theta);
  require_order(t, s, c.market.T);
  const double d = discount(c, s);
  const double elapsed = s - t;
  return {x * growth(c, t, s) + c.kappa3 / theta * d * elapsed, c.kappa3 / (theta * theta) * d * d * elapsed};
}

double tc_tradeoff(const DerivedCoefficients& c, double theta, double t, double x, double s) {
  require_theta(theta);
  require_order(t, s, c.market.T);
  const double d = discount(c, s);
  return x * growth(c, t, s) + c.kappa3 / theta * d * (1.0 - 0.5 * d) * (s - t);
}

// Precommitment -------------------------------------------------------------

Controls pre_control(const DerivedCoefficients& c, double theta, double t, double x, double s, double wealth) {
  require_theta(theta);
  require_order(t, s, c.market.T);
  if (!(t < c.market.T)) return {0.0, 0.0};
  return aux_control(c, xi_star(c, m_star(c, theta, t, x), t, x), s, wealth);
}

Moments pre_moments(const DerivedCoefficients& c, double theta, double t, double x) {
  require_theta(theta);
  require_before_horizon(t, c.market.T);
  const double tau = c.market.T - t;
  const double e = excess_growth(c, tau);
  return {x * growth(c, t, c.market.T) + e / theta, e / (theta * theta)};
}

double pre_value(const DerivedCoefficients& c, double theta, double t, double x) {
  require_theta(theta);
  require_before_horizon(t, c.market.T);
  const double tau = c.market.T - t;
  return x * growth(c, t, c.market.T) + excess_growth(c, tau) / (2.0 * theta);
}

// Auxiliary -----------------------------------------------------------------

Controls aux_control(const DerivedCoefficients& c, double xi, double s, double wealth) {
  if (!(s <= c.market.T)) throw DomainError("s must not exceed the horizon T");
  const double gap = wealth - xi * discount(c, s);
  return {-c.kappa1 * gap, -c.kappa2 * gap};
}

double aux_value(const DerivedCoefficients& c, double xi, double t, double x) {
  require_before_horizon(t, c.market.T);
  const double tau = c.market.T - t;
  const double gap = x * std::exp(c.market.r * tau) - xi;
  return gap * gap * std::exp(-c.kappa3 * tau);
}

double xi_star(const DerivedCoefficients& c, double m, double t, double x) {
  require_admissible_target(c, m, t, x);
  const double tau = c.market.T - t;
  // (m - x e^{(r - k3) tau}) / (1 - e^{-k3 tau}), written as
  // m + (m - x e^{r tau}) e^{-k3 tau} / (1 - e^{-k3 tau}) to keep m separate.
  const double excess = m - x * std::exp(c.market.r * tau);
  return m + excess / excess_growth(c, tau);
}

double m_star(const DerivedCoefficients& c, double theta, double t, double x) {
  return pre_moments(c, theta, t, x).mean;
}

// Mean targets --------------------------------------------------------------

double theta_pre_for_target(const DerivedCoefficients& c, double m, double t, double x) {
  require_admissible_target(c, m, t, x);
  const double tau = c.market.T - t;
  return excess_growth(c, tau) / (m - x * std::exp(c.market.r * tau));
}

double theta_tc_for_target(const DerivedCoefficients& c, double m, double t, double x) {
  require_admissible_target(c, m, t, x);
  const double tau = c.market.T - t;
  return c.kappa3 * tau / (m - x * std::exp(c.market.r * tau));
}

TargetControls target_controls(const DerivedCoefficients& c, double m, double t, double x, double s,
                               double wealth) {
  require_order(t, s, c.market.T);
  TargetControls out;
  out.theta_pre = theta_pre_for_target(c, m, t, x);
  out.theta_tc = theta_tc_for_target(c, m, t, x);
  out.pre = aux_control(c, xi_star(c, m, t, x), s, wealth);
  const double scale = (m - x * growth(c, t, c.market.T)) / (c.kappa3 * (c.market.T - t)) * discount(c, s);
  out.tc = {c.kappa1 * scale, c.kappa2 * scale};
  return out;
}

// Restricted markets --------------------------------------------------------

SpecialCases special_cases(const DerivedCoefficients& c, double theta, double t, double x, double y, double s) {
  require_theta(theta);
  require_order(t, s, c.market.T);
  const MarketParams& m = c.market;
  const double b2 = m.beta * m.beta + m.lambda * c.gamma_bar2;
  if (!(b2 > 0.0)) throw DomainError("no-investment case needs beta > 0 or lambda > 0");

  const double tau = m.T - t;
  const double g = std::exp(m.r * tau);
  const double common = -0.5 * theta * g * g * (x - y) * (x - y) + g * x;
  const double d = discount(c, s);
  const double sharpe2 = c.mu_bar * c.mu_bar / (m.sigma * m.sigma);

  SpecialCases out;
  out.no_investment.control = c.net_premium / (b2 * theta) * d;
  out.no_investment.value = common + c.kappa4 / (2.0 * theta) * tau;
  const double inv_num = c.mu_bar * b2 + m.rho * m.beta * m.sigma * c.net_premium;
  out.no_investment.loss = inv_num * inv_num / (b2 * c.jump_variance * m.sigma * m.sigma) * tau / (2.0 * theta);

  out.no_insurance.control = c.mu_bar / (theta * m.sigma * m.sigma) * d;
  out.no_insurance.value = common + sharpe2 / (2.0 * theta) * tau;
  const double hedged = c.net_premium + m.rho * m.beta * c.mu_bar / m.sigma;
  out.no_insurance.loss = hedged * hedged / c.jump_variance * tau / (2.0 * theta);
  return out;
}

PiDecomposition decompose_pi(const DerivedCoefficients& c, double theta, double s) {
  require_theta(theta);
  require_before_horizon(s, c.market.T);
  const MarketParams& m = c.market;
  const double b2 = m.beta * m.beta + m.lambda * c.gamma_bar2;
  const double d = discount(c, s);
  PiDecomposition out;
  out.merton_factor = b2 / c.jump_variance;
  out.merton_component = out.merton_factor * c.mu_bar / (theta * m.sigma * m.sigma) * d;
  out.hedging_component = m.rho * m.beta * c.net_premium / (c.jump_variance * m.sigma) / theta * d;
  return out;
}

// Frontiers -----------------------------------------------------------------

double sml_slope(const DerivedCoefficients& c, double t, double s) {
  require_order(t, s, c.market.T);
  return std::sqrt(c.kappa3 * (s - t));
}

double tc_frontier_variance(const DerivedCoefficients& c, double t, double x, double s, double mean) {
  require_order(t, s, c.market.T);
  if (!(s > t)) throw DomainError("frontier needs s > t");
  const double excess = mean - x * growth(c, t, s);
  if (excess < 0.0) throw DomainError("mean below the risk-free benchmark is not on the efficient branch");
  return excess * excess / (c.kappa3 * (s - t));
}

double pre_frontier_variance(const DerivedCoefficients& c, double t, double x, double s, double mean) {
  require_order(t, s, c.market.T);
  if (!(s > t)) throw DomainError("frontier needs s > t");
  const double excess = mean - x * growth(c, t, s);
  if (excess < 0.0) throw DomainError("mean below the risk-free benchmark is not on the efficient branch");
  return excess * excess / std::expm1(c.kappa3 * (s - t));
}

FrontierPoint tc_frontier_point(const DerivedCoefficients& c, double theta, double t, double x, double s) {
  const Moments mv = tc_moments(c, theta, t, x, s);
  return {mv.mean, mv.variance, s};
}

}  // namespace mvrc
