#include "fluidq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fluidq/error.hpp"
#include "fluidq/regions.hpp"

namespace fluidq {

namespace {

struct Integrator {
  const NetworkParams& p;
  Trajectory& traj;
  std::vector<double> q;
  double budget;

  Integrator(const NetworkParams& params, Trajectory& t, std::vector<double> q0)
      : p(params), traj(t), q(std::move(q0)), budget(1e-3 * params.theta) {}

  void record(double t, int mode) {
    traj.t.push_back(t);
    traj.mode.push_back(mode);
    std::vector<double> f = flows(mode, q, p);
    for (std::size_t k = 0; k < q.size(); ++k) traj.q[k].push_back(q[k]);
    for (std::size_t e = 0; e < f.size(); ++e) traj.flows[e].push_back(f[e]);
  }

  void step(int mode, double h) {
    if (p.topology == Topology::Single) {
      // Within a mode the field is piecewise constant in q with the only
      // kink at q = 0, so the flow map is closed form and exact.
      double d = p.inflows[0] - p.cap(0, mode);
      q[0] = std::max(0.0, q[0] + d * h);
      return;
    }
    auto f = [&](const std::vector<double>& y) {
      return drift(mode, clamp_to_domain(y, p), p);
    };
    const std::size_t n = q.size();
    std::vector<double> k1 = f(q), y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = q[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = f(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = q[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = f(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = q[i] + h * k3[i];
    std::vector<double> k4 = f(y);
    for (std::size_t i = 0; i < n; ++i) {
      double next = q[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      double clamped = std::max(next, 0.0);
      if (queue_has_cap(p.topology, static_cast<int>(i)))
        clamped = std::min(clamped, p.theta);
      traj.clamp_signed[i] += clamped - next;
      traj.clamp_total += std::abs(clamped - next);
      q[i] = clamped;
    }
    if (traj.clamp_total > budget)
      fail(ErrorCode::ClampBudgetExceeded,
           "cumulative clamping " + std::to_string(traj.clamp_total) +
               " exceeds 1e-3*theta; decrease dt");
  }
};

}  // namespace

Trajectory simulate(const NetworkParams& p, const GeneratorMatrix& g,
                    const SimSettings& settings) {
  const int nq = p.num_queues();
  SimSettings s = settings;
  if (s.q0.empty()) s.q0.assign(static_cast<std::size_t>(nq), 0.0);
  if (static_cast<int>(s.q0.size()) != nq)
    fail(ErrorCode::InvalidArgument, "q0 dimension does not match topology");
  if (s.dt <= 0) fail(ErrorCode::InvalidArgument, "dt must be positive");
  if (s.horizon < s.dt) fail(ErrorCode::InvalidArgument, "horizon must be at least dt");
  std::vector<double> q0c = clamp_to_domain(s.q0, p);
  for (std::size_t k = 0; k < q0c.size(); ++k)
    if (std::abs(q0c[k] - s.q0[k]) > 1e-9)
      fail(ErrorCode::StateOutOfDomain, "q0 outside the state domain");

  ModePath path = sample_path(g, s.i0, s.horizon, s.seed);

  Trajectory traj;
  traj.settings = s;
  traj.q.resize(static_cast<std::size_t>(nq));
  traj.flows.resize(flow_labels(p.topology).size());
  traj.clamp_signed.assign(static_cast<std::size_t>(nq), 0.0);

  Integrator integ(p, traj, q0c);
  // Recorded mode governs the interval starting at the sample time.
  integ.record(0.0, path.modes[0]);

  double t = 0;
  const std::size_t n_episodes = path.modes.size();
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    int mode = path.modes[ep];
    double t_end = ep < path.jump_times.size() ? path.jump_times[ep] : s.horizon;
    double span = t_end - t;
    if (span <= 0) continue;
    long nsteps = static_cast<long>(std::floor(span / s.dt - 1e-12));
    for (long i = 1; i <= nsteps; ++i) {
      integ.step(mode, s.dt);
      integ.record(t + static_cast<double>(i) * s.dt, mode);
    }
    double rem = t_end - (t + static_cast<double>(nsteps) * s.dt);
    if (rem > 1e-12) {
      integ.step(mode, rem);
      // The sample at a jump time carries the next episode's mode (the
      // derivative at a jump is defined as the right limit).
      int next_mode = ep + 1 < n_episodes ? path.modes[ep + 1] : mode;
      integ.record(t_end, next_mode);
    }
    t = t_end;
  }
  return traj;
}

Trajectory ensemble_mean(const NetworkParams& p, const GeneratorMatrix& g,
                         const SimSettings& settings, int n_paths, double dt_out) {
  if (n_paths < 1) fail(ErrorCode::InvalidArgument, "need at least one path");
  const int nq = p.num_queues();
  const std::size_t ne = flow_labels(p.topology).size();
  std::size_t n_out = static_cast<std::size_t>(std::floor(settings.horizon / dt_out)) + 1;

  Trajectory mean;
  mean.settings = settings;
  mean.settings.dt = dt_out;
  mean.q.assign(static_cast<std::size_t>(nq), std::vector<double>(n_out, 0.0));
  mean.flows.assign(ne, std::vector<double>(n_out, 0.0));
  mean.t.resize(n_out);
  mean.mode.assign(n_out, 0);
  mean.clamp_signed.assign(static_cast<std::size_t>(nq), 0.0);
  for (std::size_t j = 0; j < n_out; ++j) mean.t[j] = static_cast<double>(j) * dt_out;

  for (int path = 0; path < n_paths; ++path) {
    SimSettings s = settings;
    s.seed = settings.seed + static_cast<std::uint64_t>(path);
    Trajectory traj = simulate(p, g, s);
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < n_out; ++j) {
      double tj = mean.t[j];
      while (cursor + 1 < traj.t.size() && traj.t[cursor + 1] <= tj) ++cursor;
      std::size_t hi = std::min(cursor + 1, traj.t.size() - 1);
      double t0 = traj.t[cursor], t1 = traj.t[hi];
      double w = t1 > t0 ? std::clamp((tj - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
      for (int k = 0; k < nq; ++k)
        mean.q[static_cast<std::size_t>(k)][j] +=
            (1 - w) * traj.q[static_cast<std::size_t>(k)][cursor] +
            w * traj.q[static_cast<std::size_t>(k)][hi];
      for (std::size_t e = 0; e < ne; ++e)
        mean.flows[e][j] += (1 - w) * traj.flows[e][cursor] + w * traj.flows[e][hi];
    }
  }
  double inv = 1.0 / n_paths;
  for (auto& series : mean.q)
    for (double& x : series) x *= inv;
  for (auto& series : mean.flows)
    for (double& x : series) x *= inv;
  return mean;
}

StabilityVerdict stability_metric(const Trajectory& traj, const NetworkParams& p,
                                  double tail_fraction) {
  if (tail_fraction <= 0 || tail_fraction > 1)
    fail(ErrorCode::InvalidArgument, "tail fraction must be in (0, 1]");
  const std::size_t n = traj.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * tail_fraction));
  if (n < 2 || k < 2) fail(ErrorCode::TooFewSamples, "trajectory too short");
  std::size_t start = n - k;

  int blocks = static_cast<int>(std::min<std::size_t>(20, k / 10));
  if (blocks < 4)
    fail(ErrorCode::TooFewSamples,
         "need at least 40 tail samples for the batch-means slope");

  StabilityVerdict v;
  v.bounded = true;

  std::optional<InvariantBox> box;
  if (p.topology != Topology::Single) {
    try {
      box = invariant_box(p);
    } catch (const Error&) {
      box.reset();  // no cap check when the box is empty
    }
  }

  for (int queue = 0; queue < p.num_queues(); ++queue) {
    const auto& series = traj.q[static_cast<std::size_t>(queue)];
    // Batch means: serial correlation within a block collapses into one
    // observation, which keeps the slope standard error honest.
    std::vector<double> bt(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> bq(static_cast<std::size_t>(blocks), 0.0);
    std::vector<std::size_t> bn(static_cast<std::size_t>(blocks), 0);
    for (std::size_t i = start; i < n; ++i) {
      std::size_t b = (i - start) * static_cast<std::size_t>(blocks) / k;
      if (b >= static_cast<std::size_t>(blocks)) b = static_cast<std::size_t>(blocks) - 1;
      bt[b] += traj.t[i];
      bq[b] += series[i];
      ++bn[b];
    }
    double mt = 0, mq = 0;
    for (int b = 0; b < blocks; ++b) {
      bt[static_cast<std::size_t>(b)] /= static_cast<double>(bn[static_cast<std::size_t>(b)]);
      bq[static_cast<std::size_t>(b)] /= static_cast<double>(bn[static_cast<std::size_t>(b)]);
      mt += bt[static_cast<std::size_t>(b)];
      mq += bq[static_cast<std::size_t>(b)];
    }
    mt /= blocks;
    mq /= blocks;
    double sxx = 0, sxy = 0;
    for (int b = 0; b < blocks; ++b) {
      double dx = bt[static_cast<std::size_t>(b)] - mt;
      sxx += dx * dx;
      sxy += dx * (bq[static_cast<std::size_t>(b)] - mq);
    }
    double slope = sxy / sxx;
    double rss = 0;
    for (int b = 0; b < blocks; ++b) {
      double r = bq[static_cast<std::size_t>(b)] - mq - slope * (bt[static_cast<std::size_t>(b)] - mt);
      rss += r * r;
    }
    double se = std::sqrt(rss / (blocks - 2) / sxx);

    SlopeBand band{slope, se, blocks};
    bool ok = slope - 2 * se <= 0 && 0 <= slope + 2 * se;
    // Practical-significance floor: a stable queue started empty relaxes
    // upward toward its stationary level for the whole run, and with enough
    // averaging the band test flags that bounded drift. Growth slower than
    // 0.5% of the queue's mean service rate cannot be distinguished from
    // bounded (genuinely unstable queues grow at least at their necessary-
    // condition margin, which callers keep above 2%).
    double cap_mean = 0;
    for (int i = 0; i < p.num_modes(); ++i) cap_mean += p.cap(queue, i);
    cap_mean /= p.num_modes();
    double rate_scale = p.topology == Topology::Single ? cap_mean : cap_mean / p.v;
    if (std::abs(slope) <= 0.005 * rate_scale) ok = true;
    if (box && !queue_has_cap(p.topology, queue)) {
      double cap = 10.0 * (box->lower_sound[static_cast<std::size_t>(queue)] + box->q_c);
      double tail_max = *std::max_element(series.begin() + static_cast<std::ptrdiff_t>(start),
                                          series.end());
      if (tail_max > cap) ok = false;
    }
    v.per_queue.push_back(band);
    v.queue_bounded.push_back(ok);
    v.bounded = v.bounded && ok;
  }
  return v;
}

double mass_balance_audit(const Trajectory& traj, const NetworkParams& p) {
  const std::size_t n = traj.size();
  if (n < 2) fail(ErrorCode::TooFewSamples, "trajectory too short");
  const int nq = p.num_queues();

  auto net_rates = [&](const std::vector<double>& f) {
    switch (p.topology) {
      case Topology::Single:
        return std::vector<double>{p.inflows[0] - f[0]};
      case Topology::Tandem:
        return std::vector<double>{p.inflows[0] - f[0], f[0] - f[1]};
      case Topology::Merge:
        return std::vector<double>{p.inflows[0] - f[0], p.inflows[1] - f[1],
                                   f[0] + f[1] - f[2]};
    }
    fail(ErrorCode::InvalidArgument, "bad topology");
  };

  std::vector<double> integral(static_cast<std::size_t>(nq), 0.0);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    double h = traj.t[s + 1] - traj.t[s];
    std::vector<double> f0(traj.flows.size()), f1(traj.flows.size());
    for (std::size_t e = 0; e < traj.flows.size(); ++e) f0[e] = traj.flows[e][s];
    // The recorded mode governs [t_s, t_{s+1}); when the next sample sits on
    // a jump its recorded flows belong to the new mode, so re-evaluate the
    // closing endpoint under the governing mode.
    if (traj.mode[s + 1] == traj.mode[s]) {
      for (std::size_t e = 0; e < traj.flows.size(); ++e) f1[e] = traj.flows[e][s + 1];
    } else {
      std::vector<double> q1(static_cast<std::size_t>(nq));
      for (int quk = 0; quk < nq; ++quk)
        q1[static_cast<std::size_t>(quk)] = traj.q[static_cast<std::size_t>(quk)][s + 1];
      f1 = flows(traj.mode[s], q1, p);
    }
    std::vector<double> r0 = net_rates(f0), r1 = net_rates(f1);
    for (int k = 0; k < nq; ++k)
      integral[static_cast<std::size_t>(k)] +=
          0.5 * h * (r0[static_cast<std::size_t>(k)] + r1[static_cast<std::size_t>(k)]);
  }

  double worst = 0;
  for (int k = 0; k < nq; ++k) {
    const auto& series = traj.q[static_cast<std::size_t>(k)];
    double residual = series.back() - series.front() - integral[static_cast<std::size_t>(k)] -
                      traj.clamp_signed[static_cast<std::size_t>(k)];
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

namespace {

// Integral of max(0, q0 + d*tau) over [ta, tb].
double linear_occupancy_integral(double q0, double d, double ta, double tb) {
  if (tb <= ta) return 0;
  auto anti = [&](double tau) { return q0 * tau + 0.5 * d * tau * tau; };
  if (d >= 0) return anti(tb) - anti(ta);
  double t0 = q0 / -d;  // hits zero here, stays
  if (t0 <= ta) return 0;
  double ub = std::min(tb, t0);
  return anti(ub) - anti(ta);
}

// Time within [ta, tb] with max(0, q0 + d*tau) <= x (x >= 0).
double time_below(double q0, double d, double ta, double tb, double x) {
  if (tb <= ta) return 0;
  if (d == 0) return q0 <= x ? tb - ta : 0.0;
  if (d > 0) {
    double tx = (x - q0) / d;  // below threshold until tx
    return std::clamp(tx, ta, tb) - ta;
  }
  double tx = (q0 - x) / -d;  // reaches threshold at tx, below afterwards
  return tb - std::clamp(tx, ta, tb);
}

}  // namespace

EmpiricalCdf empirical_cdf(const NetworkParams& p, const GeneratorMatrix& g,
                           const std::vector<double>& q_grid, int n_paths,
                           double horizon, double burn_in, std::uint64_t seed) {
  if (p.topology != Topology::Single)
    fail(ErrorCode::InvalidArgument, "empirical CDF is defined for the single queue");
  if (n_paths < 1) fail(ErrorCode::InvalidArgument, "need at least one path");
  if (burn_in >= horizon) fail(ErrorCode::InvalidArgument, "burn-in exceeds horizon");

  EmpiricalCdf out;
  out.q_grid = q_grid;
  out.F.assign(static_cast<std::size_t>(g.m),
               std::vector<double>(q_grid.size(), 0.0));

  const int n_blocks = 20;
  std::vector<double> block_integral(n_blocks, 0.0);
  double block_span = (horizon - burn_in) / n_blocks;
  double a = p.inflows[0];

  for (int path = 0; path < n_paths; ++path) {
    ModePath mp = sample_path(g, 0, horizon, seed + static_cast<std::uint64_t>(path));
    double q = 0, t = 0;
    for (std::size_t ep = 0; ep < mp.modes.size(); ++ep) {
      int mode = mp.modes[ep];
      double t_end = ep < mp.jump_times.size() ? mp.jump_times[ep] : horizon;
      double span = t_end - t;
      double d = a - p.cap(0, mode);
      double ta = std::max(0.0, burn_in - t);
      if (ta < span) {
        for (std::size_t k = 0; k < q_grid.size(); ++k)
          out.F[static_cast<std::size_t>(mode)][k] += time_below(q, d, ta, span, q_grid[k]);
        // Block-resolved level integral for the growth check.
        double seg_lo = t + ta;
        while (seg_lo < t_end - 1e-12) {
          int b = std::min(n_blocks - 1,
                           static_cast<int>((seg_lo - burn_in) / block_span));
          double seg_hi = std::min(t_end, burn_in + (b + 1) * block_span);
          block_integral[static_cast<std::size_t>(b)] +=
              linear_occupancy_integral(q, d, seg_lo - t, seg_hi - t);
          seg_lo = seg_hi;
        }
      }
      q = std::max(0.0, q + d * span);
      t = t_end;
    }
  }

  double total = static_cast<double>(n_paths) * (horizon - burn_in);
  out.total_time = total;
  for (auto& row : out.F)
    for (double& x : row) x /= total;

  // Growth check on block means of the level.
  std::vector<double> bm(n_blocks);
  double mt = 0, mq = 0;
  for (int b = 0; b < n_blocks; ++b) {
    bm[static_cast<std::size_t>(b)] =
        block_integral[static_cast<std::size_t>(b)] / (block_span * n_paths);
    mt += burn_in + (b + 0.5) * block_span;
    mq += bm[static_cast<std::size_t>(b)];
  }
  mt /= n_blocks;
  mq /= n_blocks;
  double sxx = 0, sxy = 0, rss = 0;
  for (int b = 0; b < n_blocks; ++b) {
    double dx = burn_in + (b + 0.5) * block_span - mt;
    sxx += dx * dx;
    sxy += dx * (bm[static_cast<std::size_t>(b)] - mq);
  }
  double slope = sxy / sxx;
  for (int b = 0; b < n_blocks; ++b) {
    double dx = burn_in + (b + 0.5) * block_span - mt;
    double r = bm[static_cast<std::size_t>(b)] - mq - slope * dx;
    rss += r * r;
  }
  double se = std::sqrt(rss / (n_blocks - 2) / sxx);
  if (slope - 2 * se > 0)
    fail(ErrorCode::UnstableQueue,
         "queue level grows at " + std::to_string(slope) + " per hr; no stationary CDF");
  return out;
}

}  // namespace fluidq
