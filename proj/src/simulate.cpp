#include "mvrc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "mvrc/errors.hpp"
#include "mvrc/format.hpp"

namespace mvrc {

namespace {

struct StepModel {
  double r, mu_bar, p_bar, sigma, rho_beta, beta_perp, lambda;
};

Rng unit_engine(std::uint64_t seed, std::uint64_t unit) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(unit), static_cast<std::uint32_t>(unit >> 32)};
  return Rng(seq);
}

/// Simulates one unit: a single path, or a path and its mirror.
void simulate_unit(const StepModel& m, const JumpDistribution& jump, const Strategy& strategy, std::uint64_t seed,
                   std::uint64_t unit, std::size_t n_steps, double t0, double dt, double x0, bool antithetic,
                   double* out) {
  Rng rng = unit_engine(seed, unit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double jump_rate = m.lambda * dt;
  std::poisson_distribution<long> claims(jump_rate > 0.0 ? jump_rate : 1.0);
  const double sqdt = std::sqrt(dt);

  double x[2] = {x0, x0};
  const int width = antithetic ? 2 : 1;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double s = t0 + static_cast<double>(k) * dt;
    const double z1 = normal(rng) * sqdt;
    const double z2 = normal(rng) * sqdt;
    double claim_total = 0.0;
    if (jump_rate > 0.0) {
      for (long n = claims(rng); n > 0; --n) claim_total += jump.sample(rng);
    }
    for (int w = 0; w < width; ++w) {
      const double sign = w == 0 ? 1.0 : -1.0;
      const Controls u = strategy.at(s, x[w]);
      const double drift = m.r * x[w] + m.mu_bar * u.pi + m.p_bar * u.L;
      x[w] += drift * dt + sign * ((m.sigma * u.pi - m.rho_beta * u.L) * z1 - m.beta_perp * u.L * z2) -
              u.L * claim_total;
    }
  }
  out[0] = x[0];
  if (antithetic) out[1] = x[1];
}

double sample_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

/// Mean of h over samples with SE from per-unit averages (pairs when antithetic).
template <class F>
Estimate unit_estimate(const TerminalSamples& samples, F&& h) {
  const std::size_t width = samples.antithetic ? 2 : 1;
  const std::size_t units = samples.values.size() / width;
  std::vector<double> averages(units);
  for (std::size_t i = 0; i < units; ++i) {
    double acc = 0.0;
    for (std::size_t w = 0; w < width; ++w) acc += h(samples.values[i * width + w]);
    averages[i] = acc / static_cast<double>(width);
  }
  const double mean = sample_mean(averages);
  double ss = 0.0;
  for (double a : averages) ss += (a - mean) * (a - mean);
  const double var = units > 1 ? ss / static_cast<double>(units - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(units))};
}

void require_samples(const TerminalSamples& samples) {
  const std::size_t width = samples.antithetic ? 2 : 1;
  if (samples.values.size() < 2 || samples.values.size() / width < 2) {
    throw InsufficientSamples("at least two independent samples are required");
  }
}

}  // namespace

void validate(const SimulationConfig& config) {
  if (config.n_paths < 2) throw DomainError("n_paths must be at least 2");
  if (config.steps_per_year < 1) throw DomainError("steps per year must be at least 1");
  if (config.antithetic && config.n_paths % 2 != 0) throw DomainError("antithetic runs need an even n_paths");
}

std::size_t step_count(const SimulationConfig& config, double t0, double T) {
  const double steps = std::round(static_cast<double>(config.steps_per_year) * (T - t0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(0.0, steps)));
}

TerminalSamples simulate_wealth(const MarketParams& params, const JumpDistribution& jump, const Strategy& strategy,
                                const SimulationConfig& config, double t0, double x0) {
  validate(params, jump);
  validate(config);
  if (!(t0 < params.T)) throw DomainError("simulation start must precede the horizon");
  if (!std::isfinite(x0)) throw DomainError("initial wealth must be finite");
  if (t0 < strategy.start() || strategy.horizon() != params.T) {
    throw DomainError("strategy is not defined on the simulation interval");
  }

  const StepModel model{params.r,
                        params.mu - params.r,
                        params.p - params.alpha,
                        params.sigma,
                        params.rho * params.beta,
                        params.beta * std::sqrt(std::max(0.0, 1.0 - params.rho * params.rho)),
                        params.lambda};

  TerminalSamples out;
  out.antithetic = config.antithetic;
  out.n_steps = step_count(config, t0, params.T);
  out.values.assign(config.n_paths, 0.0);

  const double dt = (params.T - t0) / static_cast<double>(out.n_steps);
  const std::size_t width = config.antithetic ? 2 : 1;
  const std::size_t units = config.n_paths / width;

  unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(units, 256))));

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      simulate_unit(model, jump, strategy, config.seed, u, out.n_steps, t0, dt, x0, config.antithetic,
                    out.values.data() + u * width);
    }
  };

  if (workers == 1) {
    run(0, units);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (units + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(units, w * chunk);
      const std::size_t end = std::min(units, begin + chunk);
      pool.emplace_back(run, begin, end);
    }
  }
  return out;
}

double auxiliary_Y(const MarketParams& params, const JumpDistribution& jump, const Strategy& strategy, double t0,
                   double y0, double s, std::size_t steps) {
  if (strategy.wealth_affine()) {
    throw Unsupported("auxiliary process needs E[pi], E[L]; wealth-affine strategies are not supported");
  }
  validate(params, jump);
  if (!(t0 <= s) || !(s <= params.T)) throw DomainError("times must satisfy t0 <= s <= T");
  if (steps == 0) throw DomainError("quadrature needs at least one step");

  const double mu_bar = params.mu - params.r;
  const double net = (params.p - params.alpha) - params.lambda * jump.moments().first;
  auto rhs = [&](double v, double y) {
    const Controls u = strategy.deterministic_at(std::min(v, params.T));
    return params.r * y + mu_bar * u.pi + net * u.L;
  };

  const double h = (s - t0) / static_cast<double>(steps);
  double y = y0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double v = t0 + static_cast<double>(k) * h;
    const double k1 = rhs(v, y);
    const double k2 = rhs(v + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(v + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(v + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

ObjectiveEstimates estimate_objectives(const TerminalSamples& samples, double theta, double aux_terminal_y) {
  require_samples(samples);
  const std::vector<double>& v = samples.values;
  const double n = static_cast<double>(v.size());
  const double mean = sample_mean(v);

  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double s2 = m2 / (n - 1.0);
  m4 /= n;

  ObjectiveEstimates out;
  out.stats.n_effective = samples.antithetic ? v.size() / 2 : v.size();
  out.stats.mean = unit_estimate(samples, [](double x) { return x; });
  out.stats.variance.value = s2;
  if (samples.antithetic) {
    out.stats.variance.se = unit_estimate(samples, [mean](double x) { return (x - mean) * (x - mean); }).se;
  } else {
    const double fourth = std::max(0.0, m4 - (n - 3.0) / (n - 1.0) * s2 * s2);
    out.stats.variance.se = std::sqrt(fourth / n);
  }
  out.stats.objective.value = mean - 0.5 * theta * s2;
  out.stats.objective.se =
      unit_estimate(samples, [mean, theta](double x) { return x - 0.5 * theta * (x - mean) * (x - mean); }).se;
  out.modified = unit_estimate(samples, [theta, aux_terminal_y](double x) {
    return x - 0.5 * theta * (x - aux_terminal_y) * (x - aux_terminal_y);
  });
  return out;
}

Estimate estimate_quadratic_loss(const TerminalSamples& samples, double xi) {
  require_samples(samples);
  return unit_estimate(samples, [xi](double x) { return (x - xi) * (x - xi); });
}

void write_samples(std::ostream& out, const TerminalSamples& samples) {
  for (double x : samples.values) out << format_number(x) << '\n';
}

}  // namespace mvrc
