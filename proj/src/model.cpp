#include "mvrc/model.hpp"

#include <cmath>
#include <limits>

#include "mvrc/errors.hpp"

namespace mvrc {

namespace {

bool finite(double v) { return std::isfinite(v); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !finite(v)) {
    throw DomainError(std::string(what) + " must be positive");
  }
}

}  // namespace

std::string to_string(JumpKind kind) {
  switch (kind) {
    case JumpKind::constant:
      return "constant";
    case JumpKind::exponential:
      return "exponential";
    case JumpKind::lognormal:
      return "lognormal";
  }
  return "unknown";
}

JumpKind parse_jump_kind(const std::string& name) {
  if (name == "constant") return JumpKind::constant;
  if (name == "exponential") return JumpKind::exponential;
  if (name == "lognormal") return JumpKind::lognormal;
  throw DomainError("unknown jump kind '" + name + "' (expected constant, exponential or lognormal)");
}

JumpDistribution::JumpDistribution(JumpKind kind, double p1, double p2)
    : kind_(kind), param1_(p1), param2_(p2) {
  moments_ = jump_moments(*this);
}

JumpDistribution JumpDistribution::constant(double size) {
  require_positive(size, "constant jump size");
  return {JumpKind::constant, size, 0.0};
}

JumpDistribution JumpDistribution::exponential(double mean) {
  require_positive(mean, "exponential jump mean");
  return {JumpKind::exponential, mean, 0.0};
}

JumpDistribution JumpDistribution::lognormal(double log_mean, double log_sd) {
  if (!finite(log_mean)) throw DomainError("lognormal log-mean must be finite");
  require_positive(log_sd, "lognormal log-sd");
  return {JumpKind::lognormal, log_mean, log_sd};
}

JumpDistribution JumpDistribution::make(JumpKind kind, double param1, double param2) {
  switch (kind) {
    case JumpKind::constant:
      return constant(param1);
    case JumpKind::exponential:
      return exponential(param1);
    case JumpKind::lognormal:
      return lognormal(param1, param2);
  }
  throw DomainError("unknown jump kind");
}

double JumpDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case JumpKind::constant:
      return param1_;
    case JumpKind::exponential:
      return std::exponential_distribution<double>(1.0 / param1_)(rng);
    case JumpKind::lognormal:
      return std::lognormal_distribution<double>(param1_, param2_)(rng);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

JumpMoments jump_moments(const JumpDistribution& jump) {
  const double a = jump.param1();
  const double b = jump.param2();
  switch (jump.kind()) {
    case JumpKind::constant:
      require_positive(a, "constant jump size");
      return {a, a * a};
    case JumpKind::exponential:
      require_positive(a, "exponential jump mean");
      return {a, 2.0 * a * a};
    case JumpKind::lognormal:
      require_positive(b, "lognormal log-sd");
      return {std::exp(a + 0.5 * b * b), std::exp(2.0 * a + 2.0 * b * b)};
  }
  throw DomainError("unknown jump kind");
}

ValidationReport validate(const MarketParams& m, const JumpDistribution& jump) {
  for (double v : {m.r, m.mu, m.sigma, m.alpha, m.beta, m.rho, m.lambda, m.p, m.T}) {
    if (!finite(v)) throw DomainError("market parameters must be finite");
  }
  if (!(m.sigma > 0.0)) throw DomainError("sigma must be positive");
  if (m.beta < 0.0) throw DomainError("beta must be nonnegative");
  if (m.lambda < 0.0) throw DomainError("lambda must be nonnegative");
  if (!(m.T > 0.0)) throw DomainError("T must be positive");
  if (m.rho < -1.0 || m.rho > 1.0) throw DomainError("rho must lie in [-1, 1]");

  const JumpMoments g = jump.moments();
  const double d = m.beta * m.beta * (1.0 - m.rho * m.rho) + m.lambda * g.second;
  if (std::abs(d) <= kDegeneracyTolerance) {
    throw DegenerateModel(
        "beta^2 (1 - rho^2) + lambda * E[gamma^2] vanishes; control coefficients are undefined");
  }

  ValidationReport report;
  const double net = (m.p - m.alpha) - m.lambda * g.first;
  if (!(net > 0.0)) {
    report.warnings.push_back(
        "p - alpha <= lambda * E[gamma]: premium does not cover expected claims, ruin occurs for sure");
  }
  if (!(m.mu - m.r > 0.0)) {
    report.warnings.push_back("mu <= r: risky asset earns no excess return");
  }
  return report;
}

void validate(const Preference& pref) {
  if (!(pref.theta > 0.0) || !finite(pref.theta)) throw DomainError("theta must be positive");
}

Kappa3Forms kappa3_forms(const MarketParams& m, const JumpMoments& g) {
  const double mu_bar = m.mu - m.r;
  const double q = (m.p - m.alpha) - m.lambda * g.first;
  const double b2 = m.beta * m.beta + m.lambda * g.second;
  const double d = m.beta * m.beta * (1.0 - m.rho * m.rho) + m.lambda * g.second;
  const double s = m.sigma;

  Kappa3Forms out;
  out.expanded = (b2 * mu_bar * mu_bar + 2.0 * m.rho * m.beta * s * mu_bar * q + q * q * s * s) / (d * s * s);
  const double hedged = q + m.rho * m.beta * mu_bar / s;
  out.completed_square = mu_bar * mu_bar / (s * s) + hedged * hedged / d;
  return out;
}

DerivedCoefficients derive(const MarketParams& m, const JumpDistribution& jump) {
  validate(m, jump);

  DerivedCoefficients c;
  c.market = m;
  const JumpMoments g = jump.moments();
  c.gamma_bar1 = g.first;
  c.gamma_bar2 = g.second;
  c.mu_bar = m.mu - m.r;
  c.p_bar = m.p - m.alpha;
  c.net_premium = c.p_bar - m.lambda * g.first;
  c.jump_variance = m.beta * m.beta * (1.0 - m.rho * m.rho) + m.lambda * g.second;

  const double b2 = m.beta * m.beta + m.lambda * g.second;
  const double s = m.sigma;
  const double d = c.jump_variance;
  const double q = c.net_premium;

  c.kappa1 = (c.mu_bar * b2 + m.rho * m.beta * s * q) / (d * s * s);
  c.kappa2 = (m.rho * m.beta * c.mu_bar + q * s) / (d * s);
  c.kappa3 = kappa3_forms(m, g).expanded;
  c.kappa4 = b2 > 0.0 ? q * q / b2 : std::numeric_limits<double>::quiet_NaN();
  return c;
}

}  // namespace mvrc
