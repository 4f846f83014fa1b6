#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fluidq/ctmc.hpp"
#include "fluidq/error.hpp"
#include "fluidq/throughput.hpp"

using namespace fluidq;

namespace {

NetworkParams mu_tandem() {
  NetworkParams p;
  p.topology = Topology::Tandem;
  p.v = 8;
  p.w = 2;
  p.theta = 400;
  p.capacities = {{800, 800}, {800, 400}};
  p.inflows = {0};
  return p;
}

NetworkParams flat_tandem() {
  NetworkParams p = mu_tandem();
  p.capacities = {{800, 800}, {600, 600}};
  return p;
}

}  // namespace

TEST_CASE("necessary bound worked values") {
  NetworkParams p = mu_tandem();
  auto p1 = stationary_distribution(validate_generator({{-1, 1}, {1, -1}}));
  CHECK(necessary_bound(p, p1.p) == doctest::Approx(600.0));

  auto p2 = stationary_distribution(validate_generator({{-2, 2}, {1, -1}}));
  CHECK(necessary_bound(p, p2.p) == doctest::Approx(1600.0 / 3.0));

  NetworkParams single;
  single.topology = Topology::Single;
  single.v = 8;
  single.w = 2;
  single.theta = 400;
  single.capacities = {{700}};
  single.inflows = {0};
  CHECK(necessary_bound(single, {1.0}) == doctest::Approx(700.0));
}

TEST_CASE("necessary bound for the merge follows the inflow ray") {
  NetworkParams p;
  p.topology = Topology::Merge;
  p.v = 8;
  p.w = 2;
  p.theta = 400;
  p.capacities = {{800, 200}, {800, 200}, {800, 400}};
  p.inflows = {1, 1};  // even split
  auto pi = stationary_distribution(validate_generator({{-1, 1}, {1, -1}}));
  // per-queue averages 500/500/600; queue 3 binds: total <= 600
  CHECK(necessary_bound(p, pi.p) == doctest::Approx(600.0));
  p.inflows = {3, 5};
  // queue 2 carries 5/8 of the total: 500 / (5/8) = 800 > 600, queue 3 binds
  CHECK(necessary_bound(p, pi.p) == doctest::Approx(600.0));
  p.inflows = {1, 7};
  // queue 2 binds: 500 / (7/8) ~ 571.4
  CHECK(necessary_bound(p, pi.p) == doctest::Approx(4000.0 / 7.0));
}

TEST_CASE("flat tandem bisection lands just under the closed-form limit") {
  GeneratorMatrix g = validate_generator({{-1, 1}, {1, -1}});
  ThroughputResult r = max_stable_inflow(flat_tandem(), g, 0.5);
  CHECK(r.a_n == doctest::Approx(600.0));
  CHECK(r.a_s >= 595.0);
  CHECK(r.a_s < 600.0);
  REQUIRE(r.witness.has_value());

  // Bracket invariant along the trace: feasible points never exceed an
  // infeasible point below them.
  double max_feasible = 0, min_infeasible = r.a_n;
  for (const auto& step : r.trace) {
    if (step.feasible) max_feasible = std::max(max_feasible, step.a);
    else min_infeasible = std::min(min_infeasible, step.a);
  }
  CHECK(max_feasible <= min_infeasible);
  CHECK(r.a_s == doctest::Approx(max_feasible));

  // Iteration count: ceil(log2(a_n / tol)) bisection steps plus the probe
  // at zero.
  std::size_t expected = static_cast<std::size_t>(std::ceil(std::log2(600.0 / 0.5))) + 1;
  CHECK(r.trace.size() <= expected + 1);
}

TEST_CASE("bisection refinement consistency") {
  GeneratorMatrix g = validate_generator({{-1, 1}, {1, -1}});
  ThroughputResult coarse = max_stable_inflow(flat_tandem(), g, 2.0);
  ThroughputResult fine = max_stable_inflow(flat_tandem(), g, 1.0);
  CHECK(fine.a_s >= coarse.a_s - 2.0);
}

TEST_CASE("zero necessary bound short-circuits") {
  NetworkParams p = flat_tandem();
  p.inflows = {0};
  GeneratorMatrix g = validate_generator({{-1, 1}, {1, -1}});
  // a_n = 600 > 0 here; instead drive a_n to zero via the merge ray with a
  // zero-capacity... capacities must be positive, so emulate by checking
  // the documented no-feasible-point path on a tolerance-sized bracket.
  ThroughputResult r = max_stable_inflow(p, g, 650.0);
  CHECK(r.a_s >= 0.0);
  CHECK_FALSE(r.no_feasible_point);
}

TEST_CASE("mu sweep follows the closed-form necessary bound") {
  std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
  SweepTable t = sweep(mu_tandem(), SweepAxis::Mu, grid, 0.5);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double mu = grid[k];
    CHECK(std::abs(t.rows[k].a_n - (800.0 + 400.0 * mu) / (1.0 + mu)) <= 1e-9);
    CHECK(t.rows[k].a_s <= t.rows[k].a_n);
    if (k > 0) CHECK(t.rows[k].a_s <= t.rows[k - 1].a_s + 1e-9);
  }
}

TEST_CASE("delta_c sweep keeps the necessary bound pinned") {
  std::vector<double> grid{0.0, 100.0, 200.0, 300.0};
  SweepTable t = sweep(flat_tandem(), SweepAxis::DeltaC, grid, 0.5);
  REQUIRE(t.rows.size() == 4);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(t.rows[k].a_n == doctest::Approx(600.0));
    CHECK(t.rows[k].a_s <= t.rows[k].a_n);
    if (k > 0) CHECK(t.rows[k].a_s <= t.rows[k - 1].a_s + 1e-9);
  }
}

TEST_CASE("sweep rejects invalid grid values") {
  CHECK_THROWS_AS(sweep(flat_tandem(), SweepAxis::DeltaC, {600.0}, 0.5), Error);
  CHECK_THROWS_AS(sweep(flat_tandem(), SweepAxis::Mu, {0.0}, 0.5), Error);
  CHECK_THROWS_AS(sweep(flat_tandem(), SweepAxis::Mu, {}, 0.5), Error);
}

TEST_CASE("sweep csv format") {
  SweepTable t;
  t.axis = SweepAxis::DeltaC;
  t.rows = {{0.0, 600.0, 597.512}, {100.0, 600.0, 551.3}};
  std::ostringstream os;
  write_sweep_csv(t, os);
  CHECK(os.str() == "param,a_n,a_s\n0.00,600.00,597.51\n100.00,600.00,551.30\n");
}
