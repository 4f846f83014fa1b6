#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fluidq {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string command;  // steady-state | check | certify | max-throughput |
                        // sweep | simulate | stationary-dist
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides scenario seed
  std::optional<double> tol;          // overrides bisection tolerance
  std::optional<std::string> axis;    // mu | delta_c (sweep)
  std::vector<double> grid;           // sweep grid values
};

// Loads the scenario, dispatches to the owning module, writes report.json
// plus any CSV artifacts under out_dir. Returns the process exit status:
// 0 when the analysis completed (verdicts live in the report), 1 on module
// errors. Never encodes verdicts in the exit code.
int run_command(const RunOptions& options);

}  // namespace fluidq
