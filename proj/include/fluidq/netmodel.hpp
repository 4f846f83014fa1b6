#pragma once

#include <string>
#include <vector>

namespace fluidq {

enum class Topology { Single, Tandem, Merge };

const char* topology_name(Topology t);

// Static description of a queue network: geometry constants of the
// fundamental diagram (v, w, theta), per-queue per-mode capacities, and the
// constant inflow rate(s).
//
// Units: the single-queue state is a count [veh]; tandem/merge states are
// densities [veh/mile]. Flows and capacities are [veh/hr] throughout.
struct NetworkParams {
  Topology topology = Topology::Single;
  double v = 0;      // free-flow speed [miles/hr]
  double w = 0;      // congestion-wave speed [miles/hr]
  double theta = 0;  // jam density [veh/mile]
  std::vector<std::vector<double>> capacities;  // [queue][mode], veh/hr
  std::vector<double> inflows;                  // {a} or {a1, a2}, veh/hr

  int num_queues() const { return static_cast<int>(capacities.size()); }
  int num_modes() const {
    return capacities.empty() ? 0 : static_cast<int>(capacities[0].size());
  }
  double cap(int queue, int mode) const {
    return capacities[static_cast<std::size_t>(queue)][static_cast<std::size_t>(mode)];
  }
  // Largest capacity over all queues and modes; c_max / v is the critical
  // density at which every sending flow is saturated.
  double cap_max() const;
  double cap_min(int queue) const;
  double total_inflow() const;
};

int queues_for_topology(Topology t);
std::vector<std::string> flow_labels(Topology t);

struct ValidationIssue {
  bool error = false;  // false = warning
  std::string message;
};

// Errors on nonpositive v/w/theta/capacities, negative or missing inflows,
// and shape mismatches. The critical-flow condition
// c_max <= v*w*theta/(v+w) produces a warning only.
std::vector<ValidationIssue> validate_network(const NetworkParams& p);

// Single-queue discharge: c_i while traffic is queued, min(c_i, a) at zero.
double single_flow(int mode, double q, const NetworkParams& p);

// Tandem flows {f12, f2}.
std::vector<double> tandem_flows(int mode, const std::vector<double>& q,
                                 const NetworkParams& p);

// Merge flows {f13, f23, f3} with downstream intake split proportionally to
// the upstream queue lengths.
std::vector<double> merge_flows(int mode, const std::vector<double>& q,
                                const NetworkParams& p);

// Dispatch on topology; returns flows in the order of flow_labels().
std::vector<double> flows(int mode, const std::vector<double>& q,
                          const NetworkParams& p);

// Mass-conservation state derivative for the mode-frozen vector field.
std::vector<double> drift(int mode, const std::vector<double>& q,
                          const NetworkParams& p);

// Sum of all flows, the quantity minimized over invariant-set regions.
double flow_sum(int mode, const std::vector<double>& q, const NetworkParams& p);

// Projection onto the state domain ([0,inf) and [0,theta] coordinates).
std::vector<double> clamp_to_domain(std::vector<double> q, const NetworkParams& p);

// True iff queue k has a finite buffer (bounded by theta).
bool queue_has_cap(Topology t, int queue);

}  // namespace fluidq
