/**
 * @file closed_form.hpp
 * @brief Closed-form strategies, moments, values and frontiers.
 *
 * Two families of controls appear throughout:
 *
 * - deterministic ("time-consistent"): pi(s) = a e^{-r(T-s)}, L(s) = b e^{-r(T-s)},
 *   independent of wealth;
 * - wealth-affine ("precommitment"): pi(s) = -kappa1 (x_s - xi e^{-r(T-s)}),
 *   L(s) = -kappa2 (x_s - xi e^{-r(T-s)}) for a target level xi.
 *
 * All functions are pure. Times are absolute (t <= s <= T).
 */

#pragma once

#include "mvrc/model.hpp"

namespace mvrc {

struct Controls {
  double pi = 0.0;  ///< amount held in the risky asset
  double L = 0.0;   ///< units of liability retained
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

struct FrontierPoint {
  double mean = 0.0;
  double variance = 0.0;
  double s = 0.0;
};

enum class StrategyKind {
  TimeConsistent,
  Precommit,
  PrecommitTarget,
  TcTarget,
  AuxQuadratic,
  NoInvestment,
  NoInsurance,
  Zero,
  Constant,
};

std::string to_string(StrategyKind kind);

/**
 * A closed-form control rule bound to a coefficient snapshot.
 *
 * Build one with the named constructors; evaluate with at(). Deterministic
 * rules also answer deterministic_at() without a wealth argument, which is
 * what the forward auxiliary process needs.
 */
class Strategy {
 public:
  static Strategy time_consistent(const DerivedCoefficients& c, double theta, double t0);
  static Strategy precommit(const DerivedCoefficients& c, double theta, double t0, double x0);
  static Strategy precommit_target(const DerivedCoefficients& c, double m, double t0, double x0);
  static Strategy tc_target(const DerivedCoefficients& c, double m, double t0, double x0);
  static Strategy aux_quadratic(const DerivedCoefficients& c, double xi, double t0);
  static Strategy no_investment(const DerivedCoefficients& c, double theta, double t0);
  static Strategy no_insurance(const DerivedCoefficients& c, double theta, double t0);
  static Strategy zero(const DerivedCoefficients& c, double t0);
  /// Flat controls, no discounting.
  static Strategy constant(const DerivedCoefficients& c, Controls u, double t0);

  /// Same rule with both controls multiplied by factor.
  Strategy scaled(double factor) const;

  StrategyKind kind() const noexcept { return kind_; }
  bool wealth_affine() const noexcept { return shape_ == Shape::affine; }
  double start() const noexcept { return t0_; }
  double horizon() const noexcept { return T_; }
  /// xi for wealth-affine rules.
  double target_level() const noexcept { return xi_; }

  /// Controls at time s given current wealth. DomainError if s is outside [t0, T].
  Controls at(double s, double wealth) const;
  /// Controls of a wealth-independent rule. Unsupported for wealth-affine rules.
  Controls deterministic_at(double s) const;

 private:
  enum class Shape { discounted, affine, flat };

  Strategy(StrategyKind kind, Shape shape, const DerivedCoefficients& c, double t0);
  void check_time(double s) const;

  StrategyKind kind_;
  Shape shape_;
  double r_;
  double T_;
  double t0_;
  double a_ = 0.0;  ///< pi level (discounted/flat) or kappa1 (affine)
  double b_ = 0.0;  ///< L level (discounted/flat) or kappa2 (affine)
  double xi_ = 0.0;
  double scale_ = 1.0;
};

// Time-consistent problem ---------------------------------------------------

Controls tc_control(const DerivedCoefficients& c, double theta, double t0, double s);
double tc_value(const DerivedCoefficients& c, double theta, double t, double x, double y);
Moments tc_moments(const DerivedCoefficients& c, double theta, double t, double x, double s);
double tc_tradeoff(const DerivedCoefficients& c, double theta, double t, double x, double s);

// Precommitment problem -----------------------------------------------------

Controls pre_control(const DerivedCoefficients& c, double theta, double t, double x, double s, double wealth);
Moments pre_moments(const DerivedCoefficients& c, double theta, double t, double x);
double pre_value(const DerivedCoefficients& c, double theta, double t, double x);

// Quadratic-loss auxiliary problem inf E[(X(T) - xi)^2] ---------------------

Controls aux_control(const DerivedCoefficients& c, double xi, double s, double wealth);
double aux_value(const DerivedCoefficients& c, double xi, double t, double x);

/// Optimal Lagrange level for a mean target m > x e^{r(T-t)}.
double xi_star(const DerivedCoefficients& c, double m, double t, double x);
/// Mean target implied by risk aversion theta.
double m_star(const DerivedCoefficients& c, double theta, double t, double x);

// Mean-target strategies ----------------------------------------------------

struct TargetControls {
  Controls pre;
  Controls tc;
  double theta_pre = 0.0;  ///< risk aversion whose precommitment mean is m
  double theta_tc = 0.0;   ///< risk aversion whose time-consistent mean is m
};

TargetControls target_controls(const DerivedCoefficients& c, double m, double t, double x, double s,
                               double wealth);
double theta_pre_for_target(const DerivedCoefficients& c, double m, double t, double x);
double theta_tc_for_target(const DerivedCoefficients& c, double m, double t, double x);

// Restricted markets --------------------------------------------------------

struct RestrictedCase {
  double control = 0.0;  ///< L when pi == 0, pi when L == 0
  double value = 0.0;
  double loss = 0.0;     ///< unrestricted value minus restricted value
};

struct SpecialCases {
  RestrictedCase no_investment;
  RestrictedCase no_insurance;
};

SpecialCases special_cases(const DerivedCoefficients& c, double theta, double t, double x, double y, double s);

/// Optimal pi split into the scaled Merton term and the correlation hedge.
struct PiDecomposition {
  double merton_factor = 1.0;
  double merton_component = 0.0;
  double hedging_component = 0.0;
};

PiDecomposition decompose_pi(const DerivedCoefficients& c, double theta, double s);

// Frontiers -----------------------------------------------------------------

/// Slope of the security market line, sqrt(kappa3 (s - t)).
double sml_slope(const DerivedCoefficients& c, double t, double s);
/// Variance on the time-consistent frontier at mean `mean`, time s.
double tc_frontier_variance(const DerivedCoefficients& c, double t, double x, double s, double mean);
/// Variance on the precommitment frontier for horizon s.
double pre_frontier_variance(const DerivedCoefficients& c, double t, double x, double s, double mean);
FrontierPoint tc_frontier_point(const DerivedCoefficients& c, double theta, double t, double x, double s);

}  // namespace mvrc
