#pragma once

#include <cmath>
#include <cstdint>

namespace fluidq {

// SplitMix64: tiny splittable generator with an explicit 64-bit seed.
// Reproducibility of sampled paths is part of the API contract, so we do
// not rely on std::<distribution> implementations.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential with given rate (rate > 0).
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Index in [0, n) with probability weight[i] / sum(weight).
  int pick_weighted(const double* weight, int n) {
    double total = 0;
    for (int i = 0; i < n; ++i) total += weight[i];
    double u = uniform01() * total;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      acc += weight[i];
      if (u <= acc) return i;
    }
    return n - 1;
  }
};

}  // namespace fluidq
