/**
 * @file verify.hpp
 * @brief Independent checks of the closed forms.
 *
 * - integrate_ansatz: backward RK4 on the coefficient ODEs of the quadratic
 *   value-function ansatz A(t)(x-y)^2 + B(t)x + C(t).
 * - hjb_residual: the HJB generator written out in raw market parameters and
 *   applied to the candidate value function and controls.
 * - sensitivity_signs: central-difference signs against the published
 *   comparative-statics table.
 * - figure_checks: shape properties of the rho- and lambda-sweeps.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mvrc/closed_form.hpp"
#include "mvrc/model.hpp"

namespace mvrc {

struct OdeSolution {
  std::vector<double> t;  ///< ascending, t.back() == T
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> C;
};

/// Integrates A' = -2rA, B' = -rB, C' = kappa3 B^2 / (4A) backward from
/// (A, B, C)(T) = (-theta/2, 1, 0) over [0, T] with grid_size RK4 steps.
OdeSolution integrate_ansatz(const MarketParams& params, const JumpDistribution& jump, double theta,
                             std::size_t grid_size);

struct AnsatzDeviation {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double max() const;
};

/// Sup-norm distance of an ODE solution from the exponential closed forms.
AnsatzDeviation ansatz_deviation(const OdeSolution& sol, const MarketParams& params, const JumpDistribution& jump,
                                 double theta);

/// Linear interpolation of the ODE solution's value function at (t, x, y).
double ansatz_value(const OdeSolution& sol, double t, double x, double y);

/// HJB left side at the candidate value function, with the supremum
/// replaced by the candidate controls (or `controls` when given).
double hjb_residual(const MarketParams& params, const JumpDistribution& jump, double theta, double t, double x,
                    double y);

/// The bracketed supremand of the HJB equation for arbitrary controls.
double hjb_supremand(const MarketParams& params, const JumpDistribution& jump, double theta, double t, double x,
                     double y, Controls u);

enum class SignQuantity { pi, L, value };
std::string to_string(SignQuantity q);

/// Regime in which a published sign holds.
enum class SignRegime { always, rho_negative, rho_zero, rho_positive, sign_of_rho };

struct SignReport {
  std::string parameter;      ///< rho, mu_bar, sigma, p_bar, beta, lambda, gamma
  SignQuantity quantity = SignQuantity::pi;
  double rho = 0.0;
  double derivative = 0.0;    ///< central-difference estimate
  int observed_sign = 0;
  bool constrained = false;   ///< the published table makes a claim here
  int expected_sign = 0;
  bool agree = true;          ///< vacuously true when unconstrained
};

inline constexpr double kDefaultRelativeBump = 1e-5;

std::vector<SignReport> sensitivity_signs(const MarketParams& params, const JumpDistribution& jump, double theta,
                                          double t, double x, double bump = kDefaultRelativeBump);

struct Check {
  std::string name;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct FigureReport {
  std::vector<Check> checks;
  double kappa1_root = 0.0;
  double liability_argmin = 0.0;
  bool pass() const;
};

/// Shape checks of the rho/theta sweep and of the lambda sweep (expected-value
/// premium) around `base`, evaluated at t = 0 with T from base.
FigureReport figure_checks(const MarketParams& base, const JumpDistribution& jump);

/// Root of kappa1 in rho on (-1, 0) by bisection; NaN if there is no sign change.
double kappa1_root(const MarketParams& base, const JumpDistribution& jump);

/// Minimiser of L*(rho) on (-1, 1): grid scan refined by golden-section search.
double liability_argmin(const MarketParams& base, const JumpDistribution& jump, std::size_t grid = 401);

struct VerificationReport {
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool pass() const;
};

struct VerifyOptions {
  double theta = 2.0;
  bool include_signs = true;
  std::size_t ode_steps = 10000;
};

/// Every check above for one scenario.
VerificationReport run_verification(const MarketParams& params, const JumpDistribution& jump,
                                    const VerifyOptions& options);

/// Machine-readable JSON rendering of a report.
void write_report_json(std::ostream& out, const VerificationReport& report);

}  // namespace mvrc
