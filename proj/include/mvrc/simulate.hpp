/**
 * @file simulate.hpp
 * @brief Monte Carlo engine for the controlled wealth process.
 *
 * Left-point Euler in time, exact Poisson claim counts per step. Each path
 * owns an engine seeded from (root seed, path index), so the terminal sample
 * set depends only on (seed, n_paths, step count) and not on how paths are
 * spread over worker threads.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mvrc/closed_form.hpp"
#include "mvrc/model.hpp"

namespace mvrc {

struct SimulationConfig {
  std::size_t n_paths = 100000;
  std::size_t steps_per_year = 252;
  std::uint64_t seed = 20201129;
  bool antithetic = false;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

void validate(const SimulationConfig& config);

/// Total Euler steps for a run over [t0, T]; at least one.
std::size_t step_count(const SimulationConfig& config, double t0, double T);

struct TerminalSamples {
  std::vector<double> values;
  bool antithetic = false;  ///< values come in (path, mirrored path) pairs
  std::size_t n_steps = 0;
};

TerminalSamples simulate_wealth(const MarketParams& params, const JumpDistribution& jump, const Strategy& strategy,
                                const SimulationConfig& config, double t0, double x0);

/**
 * Forward auxiliary process dY = (rY + mu_bar E[pi] + (p_bar - lambda g1) E[L]) ds,
 * integrated with classical RK4 on a fixed grid. Only defined for strategies
 * whose controls do not depend on wealth.
 */
double auxiliary_Y(const MarketParams& params, const JumpDistribution& jump, const Strategy& strategy, double t0,
                   double y0, double s, std::size_t steps = 1000);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct PathStats {
  Estimate mean;
  Estimate variance;
  Estimate objective;  ///< mean - theta/2 variance
  std::size_t n_effective = 0;
};

struct ObjectiveEstimates {
  PathStats stats;
  Estimate modified;  ///< E[X(T) - theta/2 (X(T) - Y(T))^2]
};

ObjectiveEstimates estimate_objectives(const TerminalSamples& samples, double theta, double aux_terminal_y);

/// E[(X(T) - xi)^2] with its standard error.
Estimate estimate_quadratic_loss(const TerminalSamples& samples, double xi);

/// One terminal wealth per line, shortest round-trip decimal form.
void write_samples(std::ostream& out, const TerminalSamples& samples);

}  // namespace mvrc
