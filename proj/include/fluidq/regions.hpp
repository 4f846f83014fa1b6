#pragma once

#include <array>
#include <limits>
#include <vector>

#include "fluidq/netmodel.hpp"

namespace fluidq {

struct Interval {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();
};

// Per-queue bounds of the invariant set; upstream queues are unbounded
// above. q_c = c_max / v is the critical density splitting the set into the
// bounded part and the regions used by the drift certificate.
//
// For the merge the nominal four-term lower bound for q3 is not always
// invariant: with one upstream discharge capacity-capped, the proportional
// split can starve the other share, so the total feed into queue 3 drops
// below min(v*q3, c3) on that face. `lower_sound` holds the largest
// verified-invariant lower bounds (equal to bounds[].lo when the
// construction already checks out); `lower_face_repaired` marks the cases
// where they differ. Region minimization uses `bounds` (the nominal
// construction); containment checks use `lower_sound`.
struct InvariantBox {
  std::vector<Interval> bounds;
  std::vector<double> lower_sound;
  double q_c = 0;
  bool lower_face_repaired = false;
};

InvariantBox tandem_invariant_box(const NetworkParams& p, double a);
InvariantBox merge_invariant_box(const NetworkParams& p, double a1, double a2);
// Dispatches on topology using p.inflows.
InvariantBox invariant_box(const NetworkParams& p);

struct OracleSettings {
  double tol = 0.5;        // veh/hr agreement between successive resolutions
  int max_resolution = 129;  // per-axis cap for the global refinement scan
  int zoom_rounds = 4;       // local refinements around the best grid point
};

// Grid minimization of the total flow over a box region, with unbounded
// coordinates truncated at q_c + theta. Axes include the capacity kink
// densities c/v and theta - c/w so piecewise-linear minima land on grid
// points; the grid is refined until successive resolutions agree within
// settings.tol, then zoomed locally around the incumbent.
double brute_force_region_min(int mode, const NetworkParams& p,
                              std::vector<Interval> region,
                              int initial_resolution,
                              const OracleSettings& settings = {});

struct TandemRegionMin {
  double f1 = 0;  // min total flow over [q_c, inf) x [q2_lo, q2_hi]
  double f2 = 0;  // min total flow over [q1_lo, q_c] x [q2_lo, q2_hi]
};

// Exact by endpoint enumeration: the flow sum is nondecreasing in q1 and
// concave in q2 on each region.
TandemRegionMin tandem_region_min(int mode, const NetworkParams& p,
                                  const InvariantBox& box);

struct MergeRegionMin {
  // Authoritative minima over the three unbounded regions (at least one
  // upstream coordinate above q_c) and their overall minimum.
  double f2 = 0, f3 = 0, f4 = 0, fm = 0;
  // Value of the lower-corner candidate rule. The flow sum is not monotone
  // in the upstream coordinates once a capacity cap binds while the
  // proportional split keeps shifting intake, so the corner rule can
  // overestimate; when it does, the oracle value wins and `flagged` is set.
  double corner_fm = 0;
  bool flagged = false;
};

MergeRegionMin merge_region_min(int mode, const NetworkParams& p,
                                const InvariantBox& box,
                                const OracleSettings& settings = {});

// Aggregate over all modes, as consumed by the certificate search.
struct RegionMinima {
  InvariantBox box;
  std::vector<double> certificate_min;     // F1 (tandem) or Fm (merge), per mode
  std::vector<double> corner_min;          // corner-rule value of the same
  std::vector<double> bounded_region_min;  // min flow over the bounded region
  std::vector<std::array<double, 4>> merge_parts;  // {F2,F3,F4,Fm} per mode
  bool monotonicity_flag = false;
  double max_corner_excess = 0;  // worst corner-vs-oracle overestimate [veh/hr]
};

RegionMinima compute_region_minima(const NetworkParams& p,
                                   const OracleSettings& settings = {});

}  // namespace fluidq
