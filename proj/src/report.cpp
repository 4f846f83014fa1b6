#include "fluidq/report.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "fluidq/error.hpp"
#include "fluidq/scenario.hpp"
#include "fluidq/throughput.hpp"

namespace fluidq {

namespace {

using nlohmann::json;

json necessary_json(const NecessaryReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"label", e.label},
                       {"inflow", e.inflow},
                       {"capacity_avg", e.capacity_avg},
                       {"margin", e.margin},
                       {"pass", e.pass}});
  return {{"entries", entries}, {"pass", rep.pass}};
}

json witness_json(const Witness& w) {
  return {{"alpha", w.alpha}, {"beta", w.beta}, {"c", w.drift_c}, {"d", w.d}};
}

json minima_json(const RegionMinima& minima, Topology topo) {
  json box = json::array();
  for (std::size_t k = 0; k < minima.box.bounds.size(); ++k) {
    const auto& iv = minima.box.bounds[k];
    json b;
    b["lo"] = iv.lo;
    if (std::isfinite(iv.hi)) b["hi"] = iv.hi;
    if (minima.box.lower_sound[k] < iv.lo - 1e-9)
      b["lo_sound"] = minima.box.lower_sound[k];
    box.push_back(b);
  }
  json out{{"box", box},
           {"lower_face_repaired", minima.box.lower_face_repaired},
           {"q_c", minima.box.q_c},
           {"certificate_min", minima.certificate_min},
           {"corner_min", minima.corner_min},
           {"bounded_region_min", minima.bounded_region_min}};
  if (topo == Topology::Merge) {
    json parts = json::array();
    for (const auto& p : minima.merge_parts)
      parts.push_back({{"F2", p[0]}, {"F3", p[1]}, {"F4", p[2]}, {"Fm", p[3]}});
    out["merge_parts"] = parts;
    out["corner_rule_flag"] = minima.monotonicity_flag;
    out["max_corner_excess"] = minima.max_corner_excess;
  }
  return out;
}

json verdict_json(const StabilityVerdict& v) {
  json queues = json::array();
  for (std::size_t k = 0; k < v.per_queue.size(); ++k)
    queues.push_back({{"slope", v.per_queue[k].slope},
                      {"stderr", v.per_queue[k].stderr_},
                      {"blocks", v.per_queue[k].blocks},
                      {"bounded", static_cast<bool>(v.queue_bounded[k])}});
  return {{"per_queue", queues}, {"bounded", v.bounded}};
}

void write_trajectory_csv(const Trajectory& traj, const NetworkParams& p,
                          std::ostream& os) {
  os << "t,mode";
  for (int k = 0; k < p.num_queues(); ++k) os << ",q" << k + 1;
  for (const auto& label : flow_labels(p.topology)) os << "," << label;
  os << "\n";
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6g", x);
    os << buf;
  };
  for (std::size_t s = 0; s < traj.size(); ++s) {
    put(traj.t[s]);
    os << "," << traj.mode[s] + 1;
    for (int k = 0; k < p.num_queues(); ++k) {
      os << ",";
      put(traj.q[static_cast<std::size_t>(k)][s]);
    }
    for (std::size_t e = 0; e < traj.flows.size(); ++e) {
      os << ",";
      put(traj.flows[e][s]);
    }
    os << "\n";
  }
}

struct Context {
  Scenario scenario;
  RunOptions options;
  std::filesystem::path out;
  json report;
  std::vector<std::string> artifacts;

  void emit(const std::string& name, const std::string& content) {
    std::filesystem::path path = out / name;
    std::ofstream f(path);
    if (!f) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
    f << content;
    artifacts.push_back(path.string());
  }
};

void cmd_steady_state(Context& ctx) {
  StationaryDistribution pi = stationary_distribution(ctx.scenario.generator);
  ctx.report["stationary"] = {{"p", pi.p}, {"residual", pi.residual}};
}

void cmd_check(Context& ctx) {
  StationaryDistribution pi = stationary_distribution(ctx.scenario.generator);
  ctx.report["stationary"] = {{"p", pi.p}, {"residual", pi.residual}};
  ctx.report["necessary"] = necessary_json(necessary_check(ctx.scenario.network, pi.p));
  if (ctx.scenario.network.topology == Topology::Single) {
    Verdict v = single_queue_stability(ctx.scenario.network.inflows[0],
                                       ctx.scenario.network.capacities[0], pi.p);
    ctx.report["exact_verdict"] = verdict_name(v);
  }
}

void cmd_certify(Context& ctx) {
  const Scenario& sc = ctx.scenario;
  StationaryDistribution pi = stationary_distribution(sc.generator);
  ctx.report["stationary"] = {{"p", pi.p}, {"residual", pi.residual}};
  ctx.report["necessary"] = necessary_json(necessary_check(sc.network, pi.p));

  if (sc.network.topology == Topology::Single) {
    Verdict v = single_queue_stability(sc.network.inflows[0], sc.network.capacities[0],
                                       pi.p);
    ctx.report["exact_verdict"] = verdict_name(v);
    return;
  }

  RegionMinima minima = compute_region_minima(sc.network, sc.analysis.oracle);
  ctx.report["region_minima"] = minima_json(minima, sc.network.topology);

  SufficientResult res = sufficient_check(sc.network, minima, sc.generator,
                                          sc.analysis.cert);
  ctx.report["drift_gaps"] = res.gaps;
  if (res.witness) {
    ctx.report["sufficient"] = {{"certified", true}, {"witness", witness_json(*res.witness)}};
    double residual = drift_condition_audit(*res.witness, sc.network, sc.generator,
                                            minima, 50);
    ctx.report["drift_audit"] = {{"max_normalized_residual", residual},
                                 {"grid_per_axis", 50}};
  } else {
    ctx.report["sufficient"] = {{"certified", false},
                                {"min_violation", res.infeasible.min_violation},
                                {"beta_at_min", res.infeasible.beta_at_min}};
  }

  if (sc.analysis.audit_alpha && sc.analysis.audit_beta) {
    auto rows = evaluate_witness_inequality(*sc.analysis.audit_alpha,
                                            *sc.analysis.audit_beta, res.gaps,
                                            sc.generator);
    json audit = json::array();
    for (const auto& r : rows)
      audit.push_back({{"mode", r.mode}, {"lhs", r.lhs}, {"satisfied", r.satisfied}});
    ctx.report["external_witness_audit"] = {
        {"alpha", *sc.analysis.audit_alpha},
        {"beta", *sc.analysis.audit_beta},
        {"per_mode", audit}};
  }
}

void cmd_max_throughput(Context& ctx) {
  const Scenario& sc = ctx.scenario;
  double tol = ctx.options.tol.value_or(sc.analysis.bisect_tol);
  ThroughputResult r = max_stable_inflow(sc.network, sc.generator, tol,
                                         sc.analysis.cert, sc.analysis.oracle);
  json trace = json::array();
  for (const auto& step : r.trace)
    trace.push_back({{"a", step.a}, {"feasible", step.feasible}});
  json out{{"a_n", r.a_n},
           {"a_s", r.a_s},
           {"tolerance", tol},
           {"no_feasible_point", r.no_feasible_point},
           {"trace", trace}};
  if (r.witness) out["witness"] = witness_json(*r.witness);
  ctx.report["throughput"] = out;
}

void cmd_sweep(Context& ctx) {
  const Scenario& sc = ctx.scenario;
  if (!ctx.options.axis)
    fail(ErrorCode::InvalidArgument, "sweep needs --axis mu|delta_c");
  SweepAxis axis;
  if (*ctx.options.axis == "mu") axis = SweepAxis::Mu;
  else if (*ctx.options.axis == "delta_c") axis = SweepAxis::DeltaC;
  else fail(ErrorCode::InvalidArgument, "axis must be mu or delta_c");
  if (ctx.options.grid.empty())
    fail(ErrorCode::InvalidArgument, "sweep needs --grid values");

  double tol = ctx.options.tol.value_or(sc.analysis.bisect_tol);
  SweepTable table = sweep(sc.network, axis, ctx.options.grid, tol,
                           sc.analysis.cert, sc.analysis.oracle);
  std::ostringstream csv;
  write_sweep_csv(table, csv);
  ctx.emit("sweep.csv", csv.str());

  json rows = json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"param", row.param}, {"a_n", row.a_n}, {"a_s", row.a_s}});
  ctx.report["sweep"] = {{"axis", *ctx.options.axis}, {"rows", rows}, {"tolerance", tol}};
}

void cmd_simulate(Context& ctx) {
  const Scenario& sc = ctx.scenario;
  Trajectory traj = simulate(sc.network, sc.generator, sc.sim);
  std::ostringstream csv;
  write_trajectory_csv(traj, sc.network, csv);
  ctx.emit("trajectory.csv", csv.str());

  json sim{{"samples", traj.size()},
           {"clamp_total", traj.clamp_total},
           {"mass_balance_residual", mass_balance_audit(traj, sc.network)}};
  try {
    sim["stability"] = verdict_json(stability_metric(traj, sc.network));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewSamples) throw;
    sim["stability"] = nullptr;
  }
  ctx.report["simulation"] = sim;
}

void cmd_stationary_dist(Context& ctx) {
  const Scenario& sc = ctx.scenario;
  if (sc.network.topology != Topology::Single)
    fail(ErrorCode::InvalidArgument, "stationary-dist applies to single-queue scenarios");
  SpectralCdf cdf = single_queue_stationary_cdf(sc.network.inflows[0],
                                                sc.network.capacities[0], sc.generator);
  double q_max = 1.0;
  for (const auto& zk : cdf.z)
    q_max = std::max(q_max, std::log(1e4) / -zk.real());
  const int n = 201;
  std::ostringstream csv;
  csv << "q";
  for (int j = 0; j < sc.generator.m; ++j) csv << ",F" << j + 1;
  csv << ",total\n";
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6g", x);
    csv << buf;
  };
  for (int i = 0; i < n; ++i) {
    double q = q_max * i / (n - 1);
    put(q);
    double total = 0;
    for (int j = 0; j < sc.generator.m; ++j) {
      double f = cdf.eval(q, j);
      total += f;
      csv << ",";
      put(f);
    }
    csv << ",";
    put(total);
    csv << "\n";
  }
  ctx.emit("stationary_cdf.csv", csv.str());

  json eigen = json::array();
  for (std::size_t k = 0; k < cdf.z.size(); ++k)
    eigen.push_back({{"re", cdf.z[k].real()}, {"im", cdf.z[k].imag()}});
  ctx.report["stationary_cdf"] = {{"p", cdf.p},
                                  {"decaying_eigenvalues", eigen},
                                  {"q_max", q_max},
                                  {"prob_empty", [&] {
                                     double s = 0;
                                     for (int j = 0; j < sc.generator.m; ++j)
                                       s += cdf.eval(0.0, j);
                                     return s;
                                   }()}};
}

}  // namespace

int run_command(const RunOptions& options) {
  try {
    Context ctx;
    ctx.options = options;
    ctx.scenario = load_scenario(options.scenario_path);
    if (options.seed) ctx.scenario.sim.seed = *options.seed;
    ctx.out = options.out_dir;
    std::filesystem::create_directories(ctx.out);

    ctx.report["version"] = kVersion;
    ctx.report["command"] = options.command;
    ctx.report["scenario_path"] = options.scenario_path;
    ctx.report["scenario"] = {
        {"echo", serialize_scenario(ctx.scenario)},
        {"topology", topology_name(ctx.scenario.network.topology)},
        {"queues", ctx.scenario.network.num_queues()},
        {"modes", ctx.scenario.generator.m},
        {"seed", ctx.scenario.sim.seed}};
    ctx.report["warnings"] = ctx.scenario.warnings;

    const std::string& cmd = options.command;
    if (cmd == "steady-state") cmd_steady_state(ctx);
    else if (cmd == "check") cmd_check(ctx);
    else if (cmd == "certify") cmd_certify(ctx);
    else if (cmd == "max-throughput") cmd_max_throughput(ctx);
    else if (cmd == "sweep") cmd_sweep(ctx);
    else if (cmd == "simulate") cmd_simulate(ctx);
    else if (cmd == "stationary-dist") cmd_stationary_dist(ctx);
    else fail(ErrorCode::InvalidArgument, "unknown command '" + cmd + "'");

    ctx.report["artifacts"] = ctx.artifacts;
    std::filesystem::path report_path = ctx.out / "report.json";
    std::ofstream f(report_path);
    if (!f) fail(ErrorCode::InvalidArgument, "cannot write " + report_path.string());
    f << ctx.report.dump(2) << "\n";
    std::cout << "report: " << report_path.string() << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fluidq
