/**
 * @file model.hpp
 * @brief Scenario inputs for the combined financial/insurance market.
 *
 * The insurer's wealth evolves as
 *
 *   dX = (rX + mu_bar pi + p_bar L) dt + (sigma pi - rho beta L) dW1
 *        - beta sqrt(1 - rho^2) L dW2 - L dJ
 *
 * where J is compound Poisson with intensity lambda and claim size gamma(Z).
 * Every closed form in the library depends on the market only through the
 * handful of scalars collected in DerivedCoefficients.
 */

#pragma once

#include <random>
#include <string>
#include <vector>

namespace mvrc {

using Rng = std::mt19937_64;

struct MarketParams {
  double r = 0.0;       ///< risk-free rate
  double mu = 0.0;      ///< drift of the risky asset
  double sigma = 0.0;   ///< volatility of the risky asset
  double alpha = 0.0;   ///< drift of the unit liability process
  double beta = 0.0;    ///< diffusion volatility of the unit liability process
  double rho = 0.0;     ///< correlation between asset and liability noise
  double lambda = 0.0;  ///< claim arrival intensity
  double p = 0.0;       ///< premium rate per unit of liability
  double T = 1.0;       ///< horizon in years
};

struct Preference {
  double theta = 1.0;  ///< risk aversion
};

enum class JumpKind { constant, exponential, lognormal };

std::string to_string(JumpKind kind);
JumpKind parse_jump_kind(const std::string& name);

struct JumpMoments {
  double first = 0.0;   ///< E[gamma(Z)]
  double second = 0.0;  ///< E[gamma(Z)^2]
};

/**
 * Claim-size law. Closed forms only need the first two moments; the
 * simulator also needs draws.
 *
 * - constant:    gamma = param1
 * - exponential: mean param1
 * - lognormal:   log gamma ~ N(param1, param2^2)
 */
class JumpDistribution {
 public:
  static JumpDistribution constant(double size);
  static JumpDistribution exponential(double mean);
  static JumpDistribution lognormal(double log_mean, double log_sd);
  /// Dispatches on kind; param2 is ignored unless kind is lognormal.
  static JumpDistribution make(JumpKind kind, double param1, double param2 = 0.0);

  JumpKind kind() const noexcept { return kind_; }
  double param1() const noexcept { return param1_; }
  double param2() const noexcept { return param2_; }

  JumpMoments moments() const noexcept { return moments_; }
  double sample(Rng& rng) const;

 private:
  JumpDistribution(JumpKind kind, double p1, double p2);

  JumpKind kind_;
  double param1_;
  double param2_;
  JumpMoments moments_;
};

/// Closed-form moments; throws DomainError on nonpositive parameters.
JumpMoments jump_moments(const JumpDistribution& jump);

struct DerivedCoefficients {
  MarketParams market;
  double gamma_bar1 = 0.0;
  double gamma_bar2 = 0.0;
  double mu_bar = 0.0;        ///< mu - r
  double p_bar = 0.0;         ///< p - alpha
  double net_premium = 0.0;   ///< p_bar - lambda * gamma_bar1
  double jump_variance = 0.0; ///< beta^2 (1 - rho^2) + lambda * gamma_bar2
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;        ///< NaN when beta^2 + lambda * gamma_bar2 == 0
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

/// Lower bound on |beta^2 (1 - rho^2) + lambda * gamma_bar2| below which the
/// model is rejected as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-14;

ValidationReport validate(const MarketParams& params, const JumpDistribution& jump);
void validate(const Preference& pref);

DerivedCoefficients derive(const MarketParams& params, const JumpDistribution& jump);

/// The two algebraic routes to kappa3: the expanded quadratic form over the
/// common denominator, and the completed-square (Merton term plus hedged
/// insurance term) form.
struct Kappa3Forms {
  double expanded = 0.0;
  double completed_square = 0.0;
};

Kappa3Forms kappa3_forms(const MarketParams& params, const JumpMoments& moments);

}  // namespace mvrc
