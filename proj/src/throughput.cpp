#include "fluidq/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "fluidq/error.hpp"
#include "fluidq/regions.hpp"

namespace fluidq {

namespace {

double avg_capacity(const NetworkParams& p, const std::vector<double>& pi, int queue) {
  double s = 0;
  for (int i = 0; i < p.num_modes(); ++i)
    s += pi[static_cast<std::size_t>(i)] * p.cap(queue, i);
  return s;
}

std::vector<double> inflow_ray(const NetworkParams& p) {
  double total = p.total_inflow();
  std::vector<double> ray(p.inflows.size(), 1.0 / static_cast<double>(p.inflows.size()));
  if (total > 0)
    for (std::size_t k = 0; k < ray.size(); ++k) ray[k] = p.inflows[k] / total;
  return ray;
}

NetworkParams with_inflow(const NetworkParams& p, const std::vector<double>& ray, double t) {
  NetworkParams q = p;
  for (std::size_t k = 0; k < q.inflows.size(); ++k) q.inflows[k] = ray[k] * t;
  return q;
}

}  // namespace

double necessary_bound(const NetworkParams& p, const std::vector<double>& pi) {
  switch (p.topology) {
    case Topology::Single:
      return avg_capacity(p, pi, 0);
    case Topology::Tandem:
      return std::min(avg_capacity(p, pi, 0), avg_capacity(p, pi, 1));
    case Topology::Merge: {
      std::vector<double> ray = inflow_ray(p);
      double t = std::numeric_limits<double>::infinity();
      if (ray[0] > 0) t = std::min(t, avg_capacity(p, pi, 0) / ray[0]);
      if (ray[1] > 0) t = std::min(t, avg_capacity(p, pi, 1) / ray[1]);
      t = std::min(t, avg_capacity(p, pi, 2));  // ray sums to 1
      return t;
    }
  }
  fail(ErrorCode::InvalidArgument, "bad topology");
}

ThroughputResult max_stable_inflow(const NetworkParams& p, const GeneratorMatrix& g,
                                   double tolerance,
                                   const CertificateSettings& cert,
                                   const OracleSettings& oracle) {
  if (tolerance <= 0) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (p.topology == Topology::Single)
    fail(ErrorCode::InvalidArgument,
         "single-queue throughput equals the necessary bound exactly");

  StationaryDistribution pi = stationary_distribution(g);
  ThroughputResult res;
  res.a_n = necessary_bound(p, pi.p);
  std::vector<double> ray = inflow_ray(p);

  auto certify = [&](double t) -> std::optional<Witness> {
    NetworkParams cand = with_inflow(p, ray, t);
    try {
      RegionMinima minima = compute_region_minima(cand, oracle);
      SufficientResult s = sufficient_check(cand, minima, g, cert);
      return s.witness;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyBox) return std::nullopt;
      throw;
    }
  };

  if (res.a_n <= 0) {
    res.a_s = 0;
    res.no_feasible_point = true;
    return res;
  }

  double lo = 0, hi = res.a_n;
  auto w0 = certify(0.0);
  res.trace.push_back({0.0, w0.has_value()});
  if (!w0) {
    res.a_s = 0;
    res.no_feasible_point = true;
    return res;
  }
  res.witness = w0;

  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    auto w = certify(mid);
    res.trace.push_back({mid, w.has_value()});
    if (w) {
      lo = mid;
      res.witness = w;
    } else {
      hi = mid;
    }
  }
  res.a_s = lo;
  return res;
}

SweepTable sweep(const NetworkParams& params_template, SweepAxis axis,
                 const std::vector<double>& grid, double tolerance,
                 const CertificateSettings& cert, const OracleSettings& oracle) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "sweep grid is empty");
  if (params_template.num_modes() != 2)
    fail(ErrorCode::InvalidArgument, "sweeps are defined for two-mode networks");
  if (params_template.topology == Topology::Single)
    fail(ErrorCode::InvalidArgument, "sweeps need a tandem or merge network");

  int downstream = params_template.topology == Topology::Tandem ? 1 : 2;
  const auto& down_row = params_template.capacities[static_cast<std::size_t>(downstream)];
  double cbar = std::accumulate(down_row.begin(), down_row.end(), 0.0) /
                static_cast<double>(down_row.size());

  SweepTable table;
  table.axis = axis;
  for (double value : grid) {
    NetworkParams p = params_template;
    GeneratorMatrix g;
    if (axis == SweepAxis::Mu) {
      if (value <= 0)
        fail(ErrorCode::InvalidArgument, "mu must be positive, got " + std::to_string(value));
      g = validate_generator({{-value, value}, {1.0, -1.0}});
    } else {
      if (value < 0 || value >= cbar)
        fail(ErrorCode::InvalidArgument,
             "delta_c must lie in [0, " + std::to_string(cbar) + "), got " +
                 std::to_string(value));
      p.capacities[static_cast<std::size_t>(downstream)] = {cbar - value, cbar + value};
      g = validate_generator({{-1.0, 1.0}, {1.0, -1.0}});
    }
    StationaryDistribution pi = stationary_distribution(g);
    ThroughputResult r = max_stable_inflow(p, g, tolerance, cert, oracle);
    table.rows.push_back({value, necessary_bound(p, pi.p), r.a_s});
  }
  return table;
}

void write_sweep_csv(const SweepTable& table, std::ostream& os) {
  os << "param,a_n,a_s\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& row : table.rows)
    os << row.param << "," << row.a_n << "," << row.a_s << "\n";
}

}  // namespace fluidq
