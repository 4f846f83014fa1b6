#pragma once

#include <cstdint>
#include <vector>

#include "fluidq/ctmc.hpp"
#include "fluidq/netmodel.hpp"

namespace fluidq {

struct SimSettings {
  std::vector<double> q0;  // defaults to zeros when empty
  int i0 = 0;              // initial mode, 0-based
  double horizon = 200;    // hr
  double dt = 1e-3;        // hr
  std::uint64_t seed = 42;
};

// Sampled trajectory of the piecewise-deterministic dynamics. Series are
// stored per queue / per edge for cheap column access.
struct Trajectory {
  std::vector<double> t;
  std::vector<int> mode;
  std::vector<std::vector<double>> q;      // [queue][sample]
  std::vector<std::vector<double>> flows;  // [edge][sample]
  double clamp_total = 0;                  // accumulated projection distance
  std::vector<double> clamp_signed;        // net mass injected per queue
  SimSettings settings;

  std::size_t size() const { return t.size(); }
};

// Samples a mode path, then integrates the mode-frozen field with fixed-step
// RK4 between jumps, landing a step exactly on each jump time. The single
// queue is piecewise linear within a mode and is advanced by its closed-form
// flow map instead. Steps are projected back onto the state domain; the
// accumulated projection distance above 1e-3 * theta raises
// ClampBudgetExceeded (the exact dynamics never leave the domain, so
// clamping measures integration error).
Trajectory simulate(const NetworkParams& p, const GeneratorMatrix& g,
                    const SimSettings& settings);

// Mean of n trajectories on a uniform grid (linear interpolation), seeds
// settings.seed .. settings.seed + n - 1. Mode entries are meaningless.
Trajectory ensemble_mean(const NetworkParams& p, const GeneratorMatrix& g,
                         const SimSettings& settings, int n_paths, double dt_out);

struct SlopeBand {
  double slope = 0;   // [state unit] per hr
  double stderr_ = 0; // standard error of the slope
  int blocks = 0;
};

struct StabilityVerdict {
  std::vector<SlopeBand> per_queue;
  std::vector<bool> queue_bounded;
  bool bounded = false;
};

// Empirical boundedness proxy: ordinary least squares on batch means of the
// trailing fraction of samples (batching absorbs the serial correlation of
// the path), bounded iff each slope band contains zero and no upstream
// queue exceeds 10 * (its invariant lower bound + q_c).
StabilityVerdict stability_metric(const Trajectory& traj, const NetworkParams& p,
                                  double tail_fraction = 0.5);

// Max over queues of |q(T) - q(0) - integral of (in - out) dt - clamp|,
// trapezoidal integration of the recorded flows.
double mass_balance_audit(const Trajectory& traj, const NetworkParams& p);

struct EmpiricalCdf {
  std::vector<double> q_grid;
  std::vector<std::vector<double>> F;  // [mode][grid]: P(Q <= q, I = mode)
  double total_time = 0;
};

// Time-averaged joint distribution of the single queue from closed-form
// episode occupancy (no discretization bias). Aborts with UnstableQueue when
// the post-burn-in level keeps growing.
EmpiricalCdf empirical_cdf(const NetworkParams& p, const GeneratorMatrix& g,
                           const std::vector<double>& q_grid, int n_paths,
                           double horizon, double burn_in, std::uint64_t seed);

}  // namespace fluidq
