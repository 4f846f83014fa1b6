#pragma once

#include <cstdint>
#include <vector>

namespace fluidq {

// Generator (rate) matrix of the mode-switching chain. Off-diagonal entries
// are jump rates in 1/hr, diagonal entries make each row sum to zero.
struct GeneratorMatrix {
  int m = 0;
  std::vector<double> rates;  // row-major, m*m

  double rate(int i, int j) const { return rates[static_cast<std::size_t>(i) * m + j]; }
};

struct StationaryDistribution {
  std::vector<double> p;
  double residual = 0;  // max |(p Lambda)_j| achieved by the solve
};

// Piecewise-constant mode trajectory on [0, horizon].
struct ModePath {
  std::vector<double> jump_times;  // strictly increasing, all < horizon
  std::vector<int> modes;          // size jump_times.size() + 1, 0-based
  double horizon = 0;
  std::uint64_t seed = 0;

  int mode_at(double t) const;
  // Total occupation time of each mode over [0, horizon].
  std::vector<double> durations(int m) const;
};

// Checks squareness, nonnegative off-diagonal rates, zero row sums
// (tolerance 1e-12) and irreducibility of the rate-support digraph.
GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& rates);

// Solves p Lambda = 0, sum(p) = 1 via least squares on the stacked system
// [Lambda^T; 1^T] p = [0; 1].
StationaryDistribution stationary_distribution(const GeneratorMatrix& g);

// Samples mode jumps: holding time exponential with rate -lambda_ii, next
// mode proportional to lambda_ij. Deterministic for a given seed.
ModePath sample_path(const GeneratorMatrix& g, int i0, double horizon,
                     std::uint64_t seed);

}  // namespace fluidq
