#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "fluidq/ctmc.hpp"
#include "fluidq/netmodel.hpp"
#include "fluidq/stability.hpp"

namespace fluidq {

// Largest inflow satisfying the necessary (time-averaged capacity)
// conditions. For the merge the inflow pair moves along the ray given by
// params.inflows normalized to unit sum, so the bound is in total veh/hr.
double necessary_bound(const NetworkParams& p, const std::vector<double>& pi);

struct BisectionStep {
  double a = 0;
  bool feasible = false;
};

struct ThroughputResult {
  double a_n = 0;  // necessary bound [veh/hr]
  double a_s = 0;  // largest inflow with a certificate [veh/hr]
  std::optional<Witness> witness;  // valid at a_s
  std::vector<BisectionStep> trace;
  bool no_feasible_point = false;  // even a -> 0 had no certificate
};

// Bisection on [0, a_n]; the invariant box and region minima are recomputed
// at every candidate because the box bounds depend on the inflow. The upper
// bracket a_n itself is never attempted.
ThroughputResult max_stable_inflow(const NetworkParams& p, const GeneratorMatrix& g,
                                   double tolerance,
                                   const CertificateSettings& cert = {},
                                   const OracleSettings& oracle = {});

enum class SweepAxis { Mu, DeltaC };

struct SweepRow {
  double param = 0;
  double a_n = 0;
  double a_s = 0;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::Mu;
  std::vector<SweepRow> rows;
};

// Two-mode parameter sweeps:
//   mu axis:     generator [[-mu, mu], [1, -1]], capacities from the template
//   delta_c axis: symmetric unit-rate generator, downstream capacities
//                 [cbar - delta, cbar + delta] around the template row mean
SweepTable sweep(const NetworkParams& params_template, SweepAxis axis,
                 const std::vector<double>& grid, double tolerance,
                 const CertificateSettings& cert = {},
                 const OracleSettings& oracle = {});

// CSV with header param,a_n,a_s and fixed 2-decimal formatting.
void write_sweep_csv(const SweepTable& table, std::ostream& os);

}  // namespace fluidq
