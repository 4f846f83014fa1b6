// Acceptance suite: one numbered criterion per invocation (--criterion N) or
// all in sequence. Each criterion prints a single PASS/FAIL line plus
// indented detail lines; the exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluidq/ctmc.hpp"
#include "fluidq/error.hpp"
#include "fluidq/regions.hpp"
#include "fluidq/report.hpp"
#include "fluidq/rng.hpp"
#include "fluidq/scenario.hpp"
#include "fluidq/sim.hpp"
#include "fluidq/stability.hpp"
#include "fluidq/throughput.hpp"

using namespace fluidq;

namespace {

const std::string kScenarioDir = FLUIDQ_SCENARIO_DIR;

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    pass = pass && ok;
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

GeneratorMatrix symmetric2() { return validate_generator({{-1, 1}, {1, -1}}); }

NetworkParams table1_merge(double a1, double a2) {
  NetworkParams p;
  p.topology = Topology::Merge;
  p.v = 8;
  p.w = 2;
  p.theta = 400;
  p.capacities = {{800, 200}, {800, 200}, {800, 400}};
  p.inflows = {a1, a2};
  return p;
}

GeneratorMatrix random_generator(SplitMix64& rng, int m) {
  std::vector<std::vector<double>> rates(
      static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int i = 0; i < m; ++i) {
    double sum = 0;
    for (int j = 0; j < m; ++j)
      if (j != i) {
        rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            0.3 + 2.7 * rng.uniform01();
        sum += rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = -sum;
  }
  return validate_generator(rates);
}

// Random network satisfying the critical-flow assumption.
NetworkParams random_params(SplitMix64& rng, Topology topo, int m) {
  NetworkParams p;
  p.topology = topo;
  p.v = 4 + 8 * rng.uniform01();
  p.w = 1 + 3 * rng.uniform01();
  p.theta = 200 + 400 * rng.uniform01();
  double cap_limit = p.v * p.w * p.theta / (p.v + p.w);
  int nq = queues_for_topology(topo);
  for (int j = 0; j < nq; ++j) {
    std::vector<double> row;
    for (int i = 0; i < m; ++i) row.push_back(cap_limit * (0.3 + 0.7 * rng.uniform01()));
    p.capacities.push_back(row);
  }
  p.inflows.assign(topo == Topology::Merge ? 2 : 1, 0.0);
  for (double& a : p.inflows) a = 0.5 + 0.5 * rng.uniform01();
  return p;
}

// --- criterion 1 -----------------------------------------------------------

Criterion criterion_1() {
  Criterion c;
  auto pi = stationary_distribution(symmetric2());
  c.check(std::abs(pi.p[0] - 0.5) <= 1e-10 && std::abs(pi.p[1] - 0.5) <= 1e-10 &&
              pi.residual <= 1e-10,
          fmt("symmetric generator: p = [%.12f, %.12f], residual %.2e <= 1e-10",
              pi.p[0], pi.p[1], pi.residual));
  for (double mu : {0.5, 1.0, 2.0, 5.0}) {
    auto pm = stationary_distribution(validate_generator({{-mu, mu}, {1, -1}}));
    double e0 = std::abs(pm.p[0] - 1.0 / (1.0 + mu));
    double e1 = std::abs(pm.p[1] - mu / (1.0 + mu));
    c.check(e0 <= 1e-10 && e1 <= 1e-10,
            fmt("mu = %.1f: p = (1/(1+mu))[1, mu] within 1e-10 (err %.2e)", mu,
                std::max(e0, e1)));
  }
  return c;
}

// --- criterion 2 -----------------------------------------------------------

Criterion criterion_2() {
  Criterion c;
  NetworkParams p = table1_merge(300, 500);
  SimSettings s;
  s.horizon = 50;
  s.dt = 1e-3;
  s.seed = 42;
  Trajectory mean = ensemble_mean(p, symmetric2(), s, 20, 0.01);

  std::size_t n = mean.size();
  double q3_tail = 0;
  for (std::size_t i = n / 2; i < n; ++i) q3_tail += mean.q[2][i];
  q3_tail /= static_cast<double>(n - n / 2);

  double lo_band = p.theta - p.cap_min(2) / p.w - 20.0;  // 180
  c.check(q3_tail >= lo_band && q3_tail <= p.theta,
          fmt("q3 tail mean %.1f within [%.0f, %.0f]", q3_tail, lo_band, p.theta));
  if (q3_tail < lo_band)
    c.note(fmt("q3 settles at the congested equilibrium w*theta/(v+w) = %.0f: in the "
               "reduced mode the feed caps at c1+c2 = 400 = outflow for q3 in [50, 200] "
               "and the clear mode drains q3 to 80, so the downstream queue cannot hold "
               "near its upper bound 200; the band appears to come from narrative "
               "rather than the flow equations",
               p.w * p.theta / (p.v + p.w)));

  StabilityVerdict v = stability_metric(mean, p);
  double combined = v.per_queue[0].slope + v.per_queue[1].slope;
  c.check(combined >= 100.0 && combined <= 300.0,
          fmt("combined upstream tail slope %.1f veh/mile/hr within [100, 300]",
              combined));
  c.note(fmt("per-queue slopes: q1 %.1f +- %.1f, q2 %.1f +- %.1f", v.per_queue[0].slope,
             v.per_queue[0].stderr_, v.per_queue[1].slope, v.per_queue[1].stderr_));
  return c;
}

// --- criterion 3 -----------------------------------------------------------

Criterion criterion_3() {
  Criterion c;
  NetworkParams p = table1_merge(200, 250);
  SimSettings s;
  s.horizon = 200;
  s.dt = 1e-3;
  s.seed = 42;
  Trajectory mean = ensemble_mean(p, symmetric2(), s, 20, 0.01);
  StabilityVerdict v = stability_metric(mean, p);
  for (int k = 0; k < 3; ++k) {
    const SlopeBand& b = v.per_queue[static_cast<std::size_t>(k)];
    c.check(v.queue_bounded[static_cast<std::size_t>(k)],
            fmt("q%d tail slope band contains 0 (%.4f +- %.4f)", k + 1, b.slope,
                b.stderr_));
  }
  double q3max = *std::max_element(mean.q[2].begin(), mean.q[2].end());
  double tol = 10 * s.dt * (p.v + p.w);
  c.check(q3max <= 200.0 + tol,
          fmt("max q3 = %.2f <= 200 + %.2f (invariant upper bound)", q3max, tol));
  return c;
}

// --- criterion 4 -----------------------------------------------------------

Criterion criterion_4() {
  Criterion c;
  auto out = std::filesystem::temp_directory_path() / "fluidq_acceptance_c4";
  std::filesystem::remove_all(out);
  RunOptions opts;
  opts.command = "certify";
  opts.scenario_path = kScenarioDir + "/table1_merge.ini";
  opts.out_dir = out.string();
  c.check(run_command(opts) == 0, "certify pipeline completed with exit status 0");

  std::ifstream in(out / "report.json");
  if (!in.good()) {
    c.check(false, "report.json emitted");
    return c;
  }
  nlohmann::json rep = nlohmann::json::parse(in);
  bool has_audit = rep.contains("external_witness_audit");
  c.check(has_audit, "report records the external witness audit");
  if (has_audit) {
    for (const auto& row : rep["external_witness_audit"]["per_mode"])
      c.note(fmt("mode %d: lhs = %.2f -> %s", row["mode"].get<int>(),
                 row["lhs"].get<double>(),
                 row["satisfied"].get<bool>() ? "satisfied" : "violated"));
    c.note(fmt("oracle region minima per mode: F = [%.1f, %.1f] (corner rule [%.1f, %.1f])",
               rep["region_minima"]["certificate_min"][0].get<double>(),
               rep["region_minima"]["certificate_min"][1].get<double>(),
               rep["region_minima"]["corner_min"][0].get<double>(),
               rep["region_minima"]["corner_min"][1].get<double>()));
  }
  return c;
}

// --- criterion 5 -----------------------------------------------------------

Criterion criterion_5() {
  Criterion c;
  Scenario sc = load_scenario(kScenarioDir + "/tandem_throughput.ini");
  ThroughputResult r = max_stable_inflow(sc.network, sc.generator, 0.5,
                                         sc.analysis.cert, sc.analysis.oracle);
  c.check(std::abs(r.a_n - 600.0) <= 1e-12, fmt("a_n = %.12f exact 600", r.a_n));
  c.check(r.a_s >= 595.0 && r.a_s < 600.0, fmt("a_s = %.3f in [595, 600)", r.a_s));
  c.check(r.witness.has_value(), "witness returned at a_s");
  return c;
}

// --- criteria 6 / 7 --------------------------------------------------------

Criterion criterion_6() {
  Criterion c;
  Scenario sc = load_scenario(kScenarioDir + "/tandem_mu.ini");
  std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
  SweepTable t = sweep(sc.network, SweepAxis::Mu, grid, 0.5, sc.analysis.cert,
                       sc.analysis.oracle);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    double mu = t.rows[k].param;
    double expect = (800.0 + 400.0 * mu) / (1.0 + mu);
    c.check(std::abs(t.rows[k].a_n - expect) <= 1e-9,
            fmt("mu = %.2f: a_n = %.6f matches (800+400mu)/(1+mu) within 1e-9", mu,
                t.rows[k].a_n));
    c.check(t.rows[k].a_s <= t.rows[k].a_n,
            fmt("mu = %.2f: a_s = %.2f <= a_n = %.2f", mu, t.rows[k].a_s, t.rows[k].a_n));
    if (k > 0)
      c.check(t.rows[k].a_s <= t.rows[k - 1].a_s + 1e-9,
              fmt("a_s nonincreasing at mu = %.2f (%.2f -> %.2f)", mu,
                  t.rows[k - 1].a_s, t.rows[k].a_s));
  }
  return c;
}

Criterion criterion_7() {
  Criterion c;
  Scenario sc = load_scenario(kScenarioDir + "/tandem_throughput.ini");
  std::vector<double> grid{0.0, 100.0, 200.0, 300.0};
  SweepTable t = sweep(sc.network, SweepAxis::DeltaC, grid, 0.5, sc.analysis.cert,
                       sc.analysis.oracle);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    c.check(std::abs(t.rows[k].a_n - 600.0) <= 1e-12,
            fmt("delta_c = %.0f: a_n = %.12f == 600", t.rows[k].param, t.rows[k].a_n));
    if (k > 0)
      c.check(t.rows[k].a_s <= t.rows[k - 1].a_s + 1e-9,
              fmt("a_s nonincreasing at delta_c = %.0f (%.2f -> %.2f)", t.rows[k].param,
                  t.rows[k - 1].a_s, t.rows[k].a_s));
  }
  c.note(fmt("a_s row values: %.2f, %.2f, %.2f, %.2f", t.rows[0].a_s, t.rows[1].a_s,
             t.rows[2].a_s, t.rows[3].a_s));
  return c;
}

// --- criterion 8 -----------------------------------------------------------

Criterion criterion_8() {
  Criterion c;
  // Worked tandem values.
  NetworkParams tandem;
  tandem.topology = Topology::Tandem;
  tandem.v = 8;
  tandem.w = 2;
  tandem.theta = 400;
  tandem.capacities = {{800, 800}, {800, 400}};
  tandem.inflows = {500};
  InvariantBox tb = tandem_invariant_box(tandem, 500);
  TandemRegionMin t1 = tandem_region_min(0, tandem, tb);
  TandemRegionMin t2 = tandem_region_min(1, tandem, tb);
  std::vector<Interval> r1{{tb.q_c, std::numeric_limits<double>::infinity()},
                           tb.bounds[1]};
  double o1 = brute_force_region_min(0, tandem, r1, 33);
  double o2 = brute_force_region_min(1, tandem, r1, 33);
  c.check(std::abs(t1.f1 - 1175.0) <= 0.5 && std::abs(o1 - 1175.0) <= 0.5,
          fmt("tandem F1(1): analytic %.2f, oracle %.2f, fixture 1175", t1.f1, o1));
  c.check(std::abs(t2.f1 - 800.0) <= 0.5 && std::abs(o2 - 800.0) <= 0.5,
          fmt("tandem F1(2): analytic %.2f, oracle %.2f, fixture 800", t2.f1, o2));

  // Worked merge values.
  NetworkParams merge = table1_merge(200, 250);
  InvariantBox mb = merge_invariant_box(merge, 200, 250);
  MergeRegionMin m1 = merge_region_min(0, merge, mb);
  MergeRegionMin m2 = merge_region_min(1, merge, mb);
  c.check(std::abs(m1.fm - 1100.0) <= 0.5,
          fmt("merge F_m(1): oracle %.2f, fixture 1100 (corner rule %.2f agrees)", m1.fm,
              m1.corner_fm));
  c.check(std::abs(m2.corner_fm - 680.0) <= 0.5,
          fmt("merge mode-2 corner-rule value %.2f reproduces the worked candidate 680",
              m2.corner_fm));
  c.check(std::abs(m2.fm - 600.0) <= 0.5,
          fmt("merge F_m(2): oracle-confirmed minimum %.2f (regression fixture 600)",
              m2.fm));
  c.check(std::abs(m2.fm - 680.0) <= 0.5,
          fmt("merge F_m(2) equals the worked candidate 680 within 0.5 (got %.2f)",
              m2.fm));
  if (std::abs(m2.fm - 680.0) > 0.5)
    c.note("the 680 candidate sits at the lower corner of region 2, but the flow sum "
           "keeps falling as q2 grows (queue 1's proportional share shrinks while "
           "queue 2 is capacity-capped) with infimum 600; the corner rule's "
           "monotonicity premise fails here, the oracle value wins, and the "
           "corner-rule flag is raised in reports");
  c.check(m2.flagged, "corner-rule flag raised for merge mode 2");

  // Random parameterizations per topology.
  SplitMix64 rng(808);
  int done = 0;
  double worst_tandem = 0;
  while (done < 20) {
    NetworkParams p = random_params(rng, Topology::Tandem, 2);
    double bound = necessary_bound(p, stationary_distribution(symmetric2()).p);
    p.inflows[0] = bound * (0.2 + 0.6 * rng.uniform01());
    InvariantBox box;
    try {
      box = tandem_invariant_box(p, p.inflows[0]);
    } catch (const Error&) {
      continue;
    }
    for (int mode = 0; mode < 2; ++mode) {
      TandemRegionMin m = tandem_region_min(mode, p, box);
      std::vector<Interval> reg1{{box.q_c, std::numeric_limits<double>::infinity()},
                                 box.bounds[1]};
      std::vector<Interval> reg2{{box.bounds[0].lo, box.q_c}, box.bounds[1]};
      worst_tandem = std::max(
          worst_tandem, std::abs(m.f1 - brute_force_region_min(mode, p, reg1, 33)));
      worst_tandem = std::max(
          worst_tandem, std::abs(m.f2 - brute_force_region_min(mode, p, reg2, 33)));
    }
    ++done;
  }
  c.check(worst_tandem <= 0.5,
          fmt("20 random tandem parameterizations: max |analytic - oracle| = %.4f <= 0.5",
              worst_tandem));

  done = 0;
  int flags = 0;
  double worst_unflagged = 0, worst_excess = 0;
  while (done < 20) {
    NetworkParams p = random_params(rng, Topology::Merge, 2);
    InvariantBox box;
    try {
      box = invariant_box(p);
    } catch (const Error&) {
      continue;
    }
    for (int mode = 0; mode < 2; ++mode) {
      MergeRegionMin m = merge_region_min(mode, p, box);
      if (m.fm > m.corner_fm + 1e-9)
        worst_excess = std::max(worst_excess, m.fm - m.corner_fm);
      if (m.flagged) ++flags;
      else worst_unflagged = std::max(worst_unflagged, std::abs(m.fm - m.corner_fm));
    }
    ++done;
  }
  c.check(worst_excess <= 1e-9,
          "20 random merge parameterizations: oracle minima never exceed the corner rule");
  c.check(worst_unflagged <= 0.5,
          fmt("unflagged merge cases agree with the corner rule within 0.5 (max %.4f; "
              "%d mode-cases flagged)",
              worst_unflagged, flags));
  return c;
}

// --- criterion 9 -----------------------------------------------------------

Criterion criterion_9() {
  Criterion c;
  SplitMix64 rng(909);
  auto pi2 = stationary_distribution(symmetric2()).p;

  int runs = 0, tandem_runs = 0, tandem_breach = 0;
  int merge_runs = 0, merge_breach_nominal = 0, merge_breach_sound = 0;
  double worst_nominal = 0;
  while (runs < 100) {
    Topology topo = (runs % 2) ? Topology::Merge : Topology::Tandem;
    NetworkParams p = random_params(rng, topo, 2);
    // Stable scenario: scale inflows well inside the necessary bound.
    double bound = necessary_bound(p, pi2);
    double scale =
        bound * (0.2 + 0.5 * rng.uniform01()) / std::max(p.total_inflow(), 1e-9);
    for (double& a : p.inflows) a *= scale;
    InvariantBox box;
    try {
      box = invariant_box(p);
    } catch (const Error&) {
      continue;
    }
    ++runs;
    SimSettings s;
    s.horizon = 20;
    s.dt = 1e-3;
    s.seed = 9000 + static_cast<std::uint64_t>(runs);
    int nq = p.num_queues();
    s.q0.resize(static_cast<std::size_t>(nq));
    for (int k = 0; k < nq; ++k) {
      const Interval& b = box.bounds[static_cast<std::size_t>(k)];
      double hi = std::isfinite(b.hi) ? b.hi : b.lo + p.theta;
      s.q0[static_cast<std::size_t>(k)] = b.lo + (hi - b.lo) * rng.uniform01();
    }
    Trajectory tr = simulate(p, symmetric2(), s);
    double tol = 10 * s.dt * (p.v + p.w);
    bool breach_pub = false, breach_sound = false;
    for (int k = 0; k < nq; ++k) {
      const Interval& b = box.bounds[static_cast<std::size_t>(k)];
      for (double x : tr.q[static_cast<std::size_t>(k)]) {
        if (x < b.lo - tol) {
          breach_pub = true;
          worst_nominal = std::max(worst_nominal, b.lo - x);
        }
        if (x < box.lower_sound[static_cast<std::size_t>(k)] - tol) breach_sound = true;
        if (std::isfinite(b.hi) && x > b.hi + tol) {
          breach_pub = true;
          breach_sound = true;
        }
      }
    }
    if (topo == Topology::Tandem) {
      ++tandem_runs;
      tandem_breach += breach_pub;
    } else {
      ++merge_runs;
      merge_breach_nominal += breach_pub;
      merge_breach_sound += breach_sound;
    }
  }
  c.check(tandem_breach == 0, fmt("tandem: %d/%d runs breached the invariant box",
                                  tandem_breach, tandem_runs));
  c.check(merge_breach_nominal == 0,
          fmt("merge: %d/%d runs breached the nominal box (worst exit %.3f)",
              merge_breach_nominal, merge_runs, worst_nominal));
  if (merge_breach_nominal > 0)
    c.note("the nominal merge q3 lower bound is not invariant: with one upstream "
           "discharge capacity-capped the proportional split starves the other share "
           "and the q3 face leaks (drift -60 at (25,100,50) in the reduced mode of the "
           "reference network); the repaired sound bound is checked below");
  c.check(merge_breach_sound == 0,
          fmt("merge: %d/%d runs breached the repaired (sound) box", merge_breach_sound,
              merge_runs));
  return c;
}

// --- criterion 10 ----------------------------------------------------------

Criterion criterion_10() {
  Criterion c;
  int audited = 0;
  double worst = -std::numeric_limits<double>::infinity();

  auto audit_at = [&](const NetworkParams& p, const GeneratorMatrix& g) {
    RegionMinima minima = compute_region_minima(p);
    SufficientResult res = sufficient_check(p, minima, g);
    if (!res.witness) return;
    ++audited;
    worst = std::max(worst, drift_condition_audit(*res.witness, p, g, minima, 50));
  };

  // Every certificate issued while reproducing the criteria 5-7 runs.
  Scenario thr = load_scenario(kScenarioDir + "/tandem_throughput.ini");
  ThroughputResult r = max_stable_inflow(thr.network, thr.generator, 0.5);
  for (const auto& step : r.trace) {
    if (!step.feasible) continue;
    NetworkParams p = thr.network;
    p.inflows[0] = step.a;
    audit_at(p, thr.generator);
  }

  Scenario mu = load_scenario(kScenarioDir + "/tandem_mu.ini");
  for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    GeneratorMatrix g = validate_generator({{-m, m}, {1.0, -1.0}});
    ThroughputResult row = max_stable_inflow(mu.network, g, 0.5);
    for (const auto& step : row.trace) {
      if (!step.feasible) continue;
      NetworkParams p = mu.network;
      p.inflows[0] = step.a;
      audit_at(p, g);
    }
  }

  for (double d : {0.0, 100.0, 200.0, 300.0}) {
    NetworkParams p = thr.network;
    p.capacities[1] = {600.0 - d, 600.0 + d};
    ThroughputResult row = max_stable_inflow(p, symmetric2(), 0.5);
    for (const auto& step : row.trace) {
      if (!step.feasible) continue;
      NetworkParams q = p;
      q.inflows[0] = step.a;
      audit_at(q, symmetric2());
    }
  }

  c.check(audited > 50,
          fmt("%d witnesses audited across the criteria 5-7 scenarios", audited));
  c.check(worst <= 1e-6,
          fmt("max drift-condition residual %.3e <= 1e-6 (50-per-axis grid)", worst));
  return c;
}

// --- criterion 11 ----------------------------------------------------------

Criterion criterion_11() {
  Criterion c;
  SplitMix64 rng(2024);
  int mismatches = 0, checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int m = 2 + static_cast<int>(rng.next() % 3);
    GeneratorMatrix g = random_generator(rng, m);
    auto pi = stationary_distribution(g);
    std::vector<double> caps;
    for (int i = 0; i < m; ++i) caps.push_back(200 + 800 * rng.uniform01());
    double avg = 0;
    for (int i = 0; i < m; ++i)
      avg += pi.p[static_cast<std::size_t>(i)] * caps[static_cast<std::size_t>(i)];
    double margin = 0.10 + 0.5 * rng.uniform01();  // clear of the +-2% band
    bool stable_case = (trial % 2) == 0;
    double a = stable_case ? avg * (1 - margin) : avg * (1 + margin);
    bool zero_drift = false;
    for (double cap : caps)
      if (std::abs(a - cap) < 1e-9) zero_drift = true;
    if (zero_drift) continue;

    NetworkParams p;
    p.topology = Topology::Single;
    p.v = 8;
    p.w = 2;
    p.theta = 400;
    p.capacities = {caps};
    p.inflows = {a};
    SimSettings s;
    s.horizon = 3000;
    s.dt = 0.05;
    s.seed = 1000 + static_cast<std::uint64_t>(trial);
    Trajectory mean = ensemble_mean(p, g, s, 6, 0.05);
    StabilityVerdict v = stability_metric(mean, p, 0.4);
    Verdict analytic = single_queue_stability(a, caps, pi.p);
    ++checked;
    if (v.bounded != (analytic == Verdict::Stable)) ++mismatches;
  }
  c.check(mismatches == 0,
          fmt("analytic vs simulated verdicts: %d mismatches over %d scenarios",
              mismatches, checked));

  NetworkParams p;
  p.topology = Topology::Single;
  p.v = 8;
  p.w = 2;
  p.theta = 400;
  p.capacities = {{800, 400}};
  p.inflows = {500};
  std::vector<double> grid;
  for (double q = 0; q <= 1500; q += 5) grid.push_back(q);
  EmpiricalCdf emp = empirical_cdf(p, symmetric2(), grid, 1, 1e4, 500, 11);
  SpectralCdf analytic = single_queue_stationary_cdf(500, {800, 400}, symmetric2());
  double sup = 0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int j = 0; j < 2; ++j)
      sup = std::max(
          sup, std::abs(emp.F[static_cast<std::size_t>(j)][k] - analytic.eval(grid[k], j)));
  c.check(sup <= 0.05,
          fmt("spectral vs Monte-Carlo CDF sup-norm %.4f <= 0.05 (a=500, c=[800,400])",
              sup));
  return c;
}

struct Entry {
  int id;
  const char* title;
  double budget_s;  // wall-clock budget; 0 = none stated
  std::function<Criterion()> fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {1, "stationary distributions exact", 1.0, criterion_1},
      {2, "unstable merge reproduction", 60.0, criterion_2},
      {3, "stable merge reproduction", 120.0, criterion_3},
      {4, "reported-witness audit emitted", 60.0, criterion_4},
      {5, "tandem throughput closed form", 60.0, criterion_5},
      {6, "mu-sweep shape", 300.0, criterion_6},
      {7, "delta_c-sweep shape", 300.0, criterion_7},
      {8, "region-minimum oracle equivalence", 300.0, criterion_8},
      {9, "invariant-box containment", 300.0, criterion_9},
      {10, "certificate soundness audit", 0.0, criterion_10},
      {11, "single-queue exactness", 300.0, criterion_11},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);
  }

  int failures = 0;
  for (const auto& entry : entries()) {
    if (only != 0 && entry.id != only) continue;
    auto start = std::chrono::steady_clock::now();
    Criterion result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result.pass = false;
      result.notes.push_back(std::string("FAIL unexpected error: ") + e.what());
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (entry.budget_s > 0 && elapsed > entry.budget_s) {
      result.pass = false;
      result.notes.push_back(
          fmt("FAIL runtime %.1f s exceeds budget %.0f s", elapsed, entry.budget_s));
    }
    std::printf("[%s] criterion %d: %s (%.1f s)\n", result.pass ? "PASS" : "FAIL",
                entry.id, entry.title, elapsed);
    for (const auto& note : result.notes) std::printf("    %s\n", note.c_str());
    if (!result.pass) ++failures;
  }
  return failures;
}
