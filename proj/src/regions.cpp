#include "fluidq/regions.hpp"

#include <algorithm>
#include <cmath>

#include "fluidq/error.hpp"

namespace fluidq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Allocation-free flow-sum evaluation; the oracle calls this millions of
// times.
struct FlowSumEval {
  const NetworkParams& p;
  int mode;
  double c1, c2, c3;

  FlowSumEval(const NetworkParams& params, int i) : p(params), mode(i) {
    c1 = p.cap(0, i);
    c2 = p.num_queues() > 1 ? p.cap(1, i) : 0;
    c3 = p.num_queues() > 2 ? p.cap(2, i) : 0;
  }

  double operator()(const double* q) const {
    if (p.topology == Topology::Tandem) {
      double f12 = std::min({p.v * q[0], c1, std::max(p.w * (p.theta - q[1]), 0.0)});
      double f2 = std::min(p.v * q[1], c2);
      return f12 + f2;
    }
    double receive = std::max(p.w * (p.theta - q[2]), 0.0);
    double qsum = q[0] + q[1];
    double s1 = qsum > 0 ? q[0] / qsum * receive : 0.0;
    double s2 = qsum > 0 ? q[1] / qsum * receive : 0.0;
    double f13 = std::min({p.v * q[0], s1, c1});
    double f23 = std::min({p.v * q[1], s2, c2});
    double f3 = std::min(p.v * q[2], c3);
    return f13 + f23 + f3;
  }
};

// Densities at which some min() branch changes; putting them on the grid
// makes the scan exact for minima that sit on kinks.
std::vector<double> kink_densities(const NetworkParams& p, double q_c) {
  std::vector<double> k{q_c};
  for (const auto& row : p.capacities)
    for (double c : row) {
      k.push_back(c / p.v);
      k.push_back(p.theta - c / p.w);
    }
  return k;
}

std::vector<double> axis_points(double lo, double hi, int res,
                                const std::vector<double>& extras) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(res) + extras.size());
  if (hi <= lo) {
    pts.push_back(lo);
    return pts;
  }
  for (int i = 0; i < res; ++i)
    pts.push_back(lo + (hi - lo) * i / (res - 1));
  for (double x : extras)
    if (x > lo && x < hi) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double scan_grid(const FlowSumEval& eval, const std::vector<std::vector<double>>& axes,
                 std::vector<double>* argmin) {
  const int dim = static_cast<int>(axes.size());
  double best = kInf;
  double q[3] = {0, 0, 0};
  std::size_t n0 = axes[0].size();
  std::size_t n1 = dim > 1 ? axes[1].size() : 1;
  std::size_t n2 = dim > 2 ? axes[2].size() : 1;
  for (std::size_t a = 0; a < n0; ++a) {
    q[0] = axes[0][a];
    for (std::size_t b = 0; b < n1; ++b) {
      if (dim > 1) q[1] = axes[1][b];
      for (std::size_t c = 0; c < n2; ++c) {
        if (dim > 2) q[2] = axes[2][c];
        double val = eval(q);
        if (val < best) {
          best = val;
          if (argmin) argmin->assign(q, q + dim);
        }
      }
    }
  }
  return best;
}

}  // namespace

InvariantBox tandem_invariant_box(const NetworkParams& p, double a) {
  InvariantBox box;
  box.q_c = p.cap_max() / p.v;
  double q1_lo = std::min(a / p.v, box.q_c);
  double q2_lo = std::min(q1_lo, p.cap_min(0) / p.v);
  double q2_hi = p.theta - p.cap_min(1) / p.w;
  if (q2_lo > q2_hi)
    fail(ErrorCode::EmptyBox, "tandem invariant box empty: q2 lower bound " +
                                  std::to_string(q2_lo) + " exceeds upper bound " +
                                  std::to_string(q2_hi));
  box.bounds = {{q1_lo, kInf}, {q2_lo, q2_hi}};
  box.lower_sound = {q1_lo, q2_lo};
  return box;
}

namespace {

// Infimum of f13 + f23 over q1 >= q1_lo, q2 >= q2_lo at fixed q3. Attained
// either at the lower corner or in the limit where one queue dominates the
// proportional split and the other's share vanishes.
double merge_feed_inf(int mode, const NetworkParams& p, double q1_lo, double q2_lo,
                      double q3) {
  FlowSumEval eval(p, mode);
  double corner_q[3] = {q1_lo, q2_lo, q3};
  double corner = eval(corner_q) - std::min(p.v * q3, eval.c3);
  double wp = std::max(p.w * (p.theta - q3), 0.0);
  return std::min({corner, std::min(wp, eval.c1), std::min(wp, eval.c2)});
}

// Largest L <= nominal such that the q3 = L face has nonnegative inward
// drift for every mode and every (q1, q2) above the lower bounds.
double merge_sound_q3_lo(const NetworkParams& p, double q1_lo, double q2_lo,
                         double nominal) {
  auto face_ok = [&](double L) {
    for (int i = 0; i < p.num_modes(); ++i) {
      double feed = merge_feed_inf(i, p, q1_lo, q2_lo, L);
      double out = std::min(p.v * L, p.cap(2, i));
      if (feed < out - 1e-9) return false;
    }
    return true;
  };
  if (face_ok(nominal)) return nominal;
  double lo = 0, hi = nominal;  // L = 0 always checks out (outflow 0)
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (face_ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

InvariantBox merge_invariant_box(const NetworkParams& p, double a1, double a2) {
  InvariantBox box;
  box.q_c = p.cap_max() / p.v;
  double q1_lo = std::min(a1 / p.v, box.q_c);
  double q2_lo = std::min(a2 / p.v, box.q_c);
  double r1 = p.cap_min(0) / p.v;
  double r2 = p.cap_min(1) / p.v;
  double q3_lo = std::min({q1_lo + q2_lo, r1 + q2_lo, r2 + q1_lo, r1 + r2});
  double q3_hi = p.theta - p.cap_min(2) / p.w;
  if (q3_lo > q3_hi)
    fail(ErrorCode::EmptyBox, "merge invariant box empty: q3 lower bound " +
                                  std::to_string(q3_lo) + " exceeds upper bound " +
                                  std::to_string(q3_hi));
  box.bounds = {{q1_lo, kInf}, {q2_lo, kInf}, {q3_lo, q3_hi}};
  double sound = merge_sound_q3_lo(p, q1_lo, q2_lo, q3_lo);
  box.lower_sound = {q1_lo, q2_lo, sound};
  box.lower_face_repaired = sound < q3_lo - 1e-6;
  return box;
}

InvariantBox invariant_box(const NetworkParams& p) {
  switch (p.topology) {
    case Topology::Tandem:
      return tandem_invariant_box(p, p.inflows.at(0));
    case Topology::Merge:
      return merge_invariant_box(p, p.inflows.at(0), p.inflows.at(1));
    case Topology::Single:
      break;
  }
  fail(ErrorCode::InvalidArgument, "invariant boxes exist for tandem and merge only");
}

double brute_force_region_min(int mode, const NetworkParams& p,
                              std::vector<Interval> region, int initial_resolution,
                              const OracleSettings& settings) {
  double q_c = p.cap_max() / p.v;
  double trunc = q_c + p.theta;
  for (auto& iv : region)
    if (!std::isfinite(iv.hi)) iv.hi = std::max(trunc, iv.lo);

  FlowSumEval eval(p, mode);
  std::vector<double> extras = kink_densities(p, q_c);
  const int dim = static_cast<int>(region.size());

  auto scan_at = [&](int res, std::vector<double>* arg) {
    std::vector<std::vector<double>> axes;
    axes.reserve(static_cast<std::size_t>(dim));
    for (const auto& iv : region) axes.push_back(axis_points(iv.lo, iv.hi, res, extras));
    return scan_grid(eval, axes, arg);
  };

  int res = std::max(initial_resolution, 3);
  std::vector<double> arg;
  double best = scan_at(res, &arg);
  while (res < settings.max_resolution) {
    res = res * 2 - 1;
    std::vector<double> arg2;
    double next = scan_at(res, &arg2);
    double delta = best - next;  // refinement can only lower the minimum
    if (next < best) {
      best = next;
      arg = arg2;
    }
    if (std::abs(delta) <= settings.tol) break;
  }

  // Local refinement around the incumbent: piecewise structure puts minima
  // on low-dimensional intersections that a uniform grid straddles.
  for (int round = 0; round < settings.zoom_rounds; ++round) {
    std::vector<std::vector<double>> axes;
    for (int k = 0; k < dim; ++k) {
      const Interval& iv = region[static_cast<std::size_t>(k)];
      double span = (iv.hi - iv.lo) / (res - 1);
      double lo = std::max(iv.lo, arg[static_cast<std::size_t>(k)] - span);
      double hi = std::min(iv.hi, arg[static_cast<std::size_t>(k)] + span);
      axes.push_back(axis_points(lo, hi, 17, extras));
    }
    std::vector<double> arg2;
    double zoomed = scan_grid(eval, axes, &arg2);
    if (zoomed < best) {
      best = zoomed;
      arg = arg2;
    }
    res = (res - 1) * 8 + 1;  // effective spacing shrinks 8x per round
  }
  return best;
}

TandemRegionMin tandem_region_min(int mode, const NetworkParams& p,
                                  const InvariantBox& box) {
  FlowSumEval eval(p, mode);
  double q2_lo = box.bounds[1].lo, q2_hi = box.bounds[1].hi;
  auto min_at_q1 = [&](double q1) {
    double a[3] = {q1, q2_lo, 0};
    double b[3] = {q1, q2_hi, 0};
    return std::min(eval(a), eval(b));
  };
  return {min_at_q1(box.q_c), min_at_q1(box.bounds[0].lo)};
}

namespace {

// Infimum of the merge flow sum along the unbounded directions of a region.
// With v*q large on the diverging coordinates, the flow sum approaches
//   min(u*wp, c1) + min((1-u)*wp, c2) + f3,  u = q1/(q1+q2),
// whose minimum over the reachable u is at the u range endpoints. Region 2
// (q2 -> inf, q1 bounded) reaches only u -> 0, region 3 only u -> 1,
// region 4 the full range.
double merge_tail_min(int region_id, const FlowSumEval& e, const NetworkParams& p,
                      const InvariantBox& box) {
  std::vector<double> q3s{box.bounds[2].lo, box.bounds[2].hi};
  for (double k : kink_densities(p, box.q_c))
    if (k > box.bounds[2].lo && k < box.bounds[2].hi) q3s.push_back(k);
  double best = kInf;
  for (double q3 : q3s) {
    double wp = std::max(p.w * (p.theta - q3), 0.0);
    double f3 = std::min(p.v * q3, e.c3);
    double val = kInf;
    if (region_id == 2) val = std::min(wp, e.c2) + f3;
    if (region_id == 3) val = std::min(wp, e.c1) + f3;
    if (region_id == 4) val = std::min({wp, e.c1, e.c2}) + f3;
    best = std::min(best, val);
  }
  return best;
}

}  // namespace

MergeRegionMin merge_region_min(int mode, const NetworkParams& p,
                                const InvariantBox& box,
                                const OracleSettings& settings) {
  FlowSumEval eval(p, mode);
  double q1_lo = box.bounds[0].lo, q2_lo = box.bounds[1].lo;
  double q3_lo = box.bounds[2].lo, q3_hi = box.bounds[2].hi;
  double qc = box.q_c;

  auto corner = [&](double q1, double q2) {
    double a[3] = {q1, q2, q3_lo};
    double b[3] = {q1, q2, q3_hi};
    return std::min(eval(a), eval(b));
  };
  double corner2 = corner(q1_lo, qc);
  double corner3 = corner(qc, q2_lo);
  double corner4 = corner(qc, qc);

  auto oracle = [&](std::vector<Interval> region, int id) {
    double grid = brute_force_region_min(mode, p, std::move(region), 33, settings);
    return std::min(grid, merge_tail_min(id, eval, p, box));
  };
  double f2 = std::min(corner2, oracle({{q1_lo, qc}, {qc, kInf}, {q3_lo, q3_hi}}, 2));
  double f3 = std::min(corner3, oracle({{qc, kInf}, {q2_lo, qc}, {q3_lo, q3_hi}}, 3));
  double f4 = std::min(corner4, oracle({{qc, kInf}, {qc, kInf}, {q3_lo, q3_hi}}, 4));

  MergeRegionMin out;
  out.f2 = f2;
  out.f3 = f3;
  out.f4 = f4;
  out.fm = std::min({f2, f3, f4});
  out.corner_fm = std::min({corner2, corner3, corner4});
  out.flagged = out.corner_fm > out.fm + settings.tol;
  return out;
}

RegionMinima compute_region_minima(const NetworkParams& p,
                                   const OracleSettings& settings) {
  RegionMinima out;
  out.box = invariant_box(p);
  const int m = p.num_modes();
  for (int i = 0; i < m; ++i) {
    if (p.topology == Topology::Tandem) {
      TandemRegionMin r = tandem_region_min(i, p, out.box);
      out.certificate_min.push_back(r.f1);
      out.corner_min.push_back(r.f1);
      out.bounded_region_min.push_back(r.f2);
    } else {
      MergeRegionMin r = merge_region_min(i, p, out.box, settings);
      out.certificate_min.push_back(r.fm);
      out.corner_min.push_back(r.corner_fm);
      out.merge_parts.push_back({r.f2, r.f3, r.f4, r.fm});
      if (r.flagged) out.monotonicity_flag = true;
      out.max_corner_excess = std::max(out.max_corner_excess, r.corner_fm - r.fm);

      // Bounded part [q1_lo,q_c] x [q2_lo,q_c] x [q3_lo,q3_hi]; only needed
      // as a finite lower bound for the drift constant, so a moderate grid
      // with a Lipschitz slack is enough.
      std::vector<Interval> bounded{{out.box.bounds[0].lo, out.box.q_c},
                                    {out.box.bounds[1].lo, out.box.q_c},
                                    {out.box.bounds[2].lo, out.box.bounds[2].hi}};
      OracleSettings coarse = settings;
      coarse.max_resolution = 65;
      coarse.zoom_rounds = 2;
      double grid = brute_force_region_min(i, p, bounded, 33, coarse);
      double span = 0;
      for (const auto& iv : bounded) span = std::max(span, iv.hi - iv.lo);
      double slack = (p.v + p.w) * span / 64.0;
      out.bounded_region_min.push_back(std::max(0.0, grid - slack));
    }
  }
  return out;
}

}  // namespace fluidq
