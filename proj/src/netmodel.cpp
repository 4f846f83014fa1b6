#include "fluidq/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluidq/error.hpp"

namespace fluidq {

namespace {

constexpr double kDomainTol = 1e-9;

void check_state(const std::vector<double>& q, const NetworkParams& p) {
  if (static_cast<int>(q.size()) != p.num_queues())
    fail(ErrorCode::InvalidArgument, "state dimension does not match topology");
  for (int k = 0; k < p.num_queues(); ++k) {
    double qk = q[static_cast<std::size_t>(k)];
    if (qk < -kDomainTol)
      fail(ErrorCode::StateOutOfDomain, "q" + std::to_string(k + 1) + " negative");
    if (queue_has_cap(p.topology, k) && qk > p.theta + kDomainTol)
      fail(ErrorCode::StateOutOfDomain,
           "q" + std::to_string(k + 1) + " exceeds jam density");
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::Single: return "single";
    case Topology::Tandem: return "tandem";
    case Topology::Merge: return "merge";
  }
  return "?";
}

int queues_for_topology(Topology t) {
  switch (t) {
    case Topology::Single: return 1;
    case Topology::Tandem: return 2;
    case Topology::Merge: return 3;
  }
  return 0;
}

std::vector<std::string> flow_labels(Topology t) {
  switch (t) {
    case Topology::Single: return {"f"};
    case Topology::Tandem: return {"f12", "f2"};
    case Topology::Merge: return {"f13", "f23", "f3"};
  }
  return {};
}

bool queue_has_cap(Topology t, int queue) {
  return (t == Topology::Tandem && queue == 1) ||
         (t == Topology::Merge && queue == 2);
}

double NetworkParams::cap_max() const {
  double m = 0;
  for (const auto& row : capacities)
    for (double c : row) m = std::max(m, c);
  return m;
}

double NetworkParams::cap_min(int queue) const {
  const auto& row = capacities[static_cast<std::size_t>(queue)];
  return *std::min_element(row.begin(), row.end());
}

double NetworkParams::total_inflow() const {
  double s = 0;
  for (double a : inflows) s += a;
  return s;
}

std::vector<ValidationIssue> validate_network(const NetworkParams& p) {
  std::vector<ValidationIssue> issues;
  auto err = [&](const std::string& m) { issues.push_back({true, m}); };
  auto warn = [&](const std::string& m) { issues.push_back({false, m}); };

  if (p.v <= 0) err("free-flow speed v must be positive");
  if (p.w <= 0) err("congestion-wave speed w must be positive");
  if (p.theta <= 0) err("jam density theta must be positive");

  int nq = queues_for_topology(p.topology);
  if (p.num_queues() != nq)
    err("topology " + std::string(topology_name(p.topology)) + " needs " +
        std::to_string(nq) + " capacity rows, got " + std::to_string(p.num_queues()));
  int m = p.num_modes();
  if (m < 1) err("at least one mode required");
  for (int j = 0; j < p.num_queues(); ++j) {
    if (static_cast<int>(p.capacities[static_cast<std::size_t>(j)].size()) != m)
      err("capacity rows have inconsistent mode counts");
    for (double c : p.capacities[static_cast<std::size_t>(j)])
      if (c <= 0) err("capacity of queue " + std::to_string(j + 1) + " must be positive");
  }
  int ninfl = p.topology == Topology::Merge ? 2 : 1;
  if (static_cast<int>(p.inflows.size()) != ninfl)
    err("topology " + std::string(topology_name(p.topology)) + " needs " +
        std::to_string(ninfl) + " inflow value(s)");
  for (double a : p.inflows)
    if (a < 0) err("inflow rates must be nonnegative");

  bool ok = true;
  for (const auto& issue : issues) ok = ok && !issue.error;
  if (ok && p.topology != Topology::Single) {
    double limit = p.v * p.w * p.theta / (p.v + p.w);
    double cmax = p.cap_max();
    if (cmax > limit + 1e-12)
      warn("critical-flow assumption violated: c_max = " + fmt(cmax) +
           " > v*w*theta/(v+w) = " + fmt(limit) +
           "; invariant-set results may not apply");
  }
  return issues;
}

double single_flow(int mode, double q, const NetworkParams& p) {
  if (q < -kDomainTol) fail(ErrorCode::StateOutOfDomain, "queue length negative");
  double c = p.cap(0, mode);
  return q > 0 ? c : std::min(c, p.inflows[0]);
}

std::vector<double> tandem_flows(int mode, const std::vector<double>& q,
                                 const NetworkParams& p) {
  check_state(q, p);
  double s1 = std::min(p.v * q[0], p.cap(0, mode));
  double r2 = p.w * (p.theta - q[1]);
  double f12 = std::min(s1, std::max(r2, 0.0));
  double f2 = std::min(p.v * q[1], p.cap(1, mode));
  return {f12, f2};
}

std::vector<double> merge_flows(int mode, const std::vector<double>& q,
                                const NetworkParams& p) {
  check_state(q, p);
  double receive = p.w * (p.theta - q[2]);
  receive = std::max(receive, 0.0);
  double qsum = q[0] + q[1];
  // When both upstream queues are empty the allocation fractions are defined
  // as 0; the sending terms v*q_j vanish anyway so the flows are 0.
  double share1 = qsum > 0 ? q[0] / qsum * receive : 0.0;
  double share2 = qsum > 0 ? q[1] / qsum * receive : 0.0;
  double f13 = std::min({p.v * q[0], share1, p.cap(0, mode)});
  double f23 = std::min({p.v * q[1], share2, p.cap(1, mode)});
  double f3 = std::min(p.v * q[2], p.cap(2, mode));
  return {f13, f23, f3};
}

std::vector<double> flows(int mode, const std::vector<double>& q,
                          const NetworkParams& p) {
  switch (p.topology) {
    case Topology::Single:
      return {single_flow(mode, q.at(0), p)};
    case Topology::Tandem:
      return tandem_flows(mode, q, p);
    case Topology::Merge:
      return merge_flows(mode, q, p);
  }
  fail(ErrorCode::InvalidArgument, "bad topology");
}

std::vector<double> drift(int mode, const std::vector<double>& q,
                          const NetworkParams& p) {
  std::vector<double> f = flows(mode, q, p);
  switch (p.topology) {
    case Topology::Single:
      return {p.inflows[0] - f[0]};
    case Topology::Tandem:
      return {p.inflows[0] - f[0], f[0] - f[1]};
    case Topology::Merge:
      return {p.inflows[0] - f[0], p.inflows[1] - f[1], f[0] + f[1] - f[2]};
  }
  fail(ErrorCode::InvalidArgument, "bad topology");
}

double flow_sum(int mode, const std::vector<double>& q, const NetworkParams& p) {
  std::vector<double> f = flows(mode, q, p);
  double s = 0;
  for (double x : f) s += x;
  return s;
}

std::vector<double> clamp_to_domain(std::vector<double> q, const NetworkParams& p) {
  for (int k = 0; k < static_cast<int>(q.size()); ++k) {
    auto& qk = q[static_cast<std::size_t>(k)];
    qk = std::max(qk, 0.0);
    if (queue_has_cap(p.topology, k)) qk = std::min(qk, p.theta);
  }
  return q;
}

}  // namespace fluidq
