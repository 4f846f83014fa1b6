#include "fluidq/stability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fluidq/error.hpp"

namespace fluidq {

namespace {

constexpr double kFeasTol = 1e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Phase-1 simplex for: x >= 0 with A x <= b. Returns the attained
// infeasibility (0 when feasible) and fills x on success. Bland's rule, so
// termination is guaranteed; problems here are tiny (m modes).
double phase1_feasibility(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b, std::vector<double>* x) {
  const int rows = static_cast<int>(A.size());
  const int vars = rows == 0 ? 0 : static_cast<int>(A[0].size());
  int art = 0;
  for (double bi : b)
    if (bi < 0) ++art;

  const int cols = vars + rows + art + 1;  // x, slacks, artificials, rhs
  std::vector<std::vector<double>> T(static_cast<std::size_t>(rows),
                                     std::vector<double>(static_cast<std::size_t>(cols), 0.0));
  std::vector<int> basis(static_cast<std::size_t>(rows));
  std::vector<char> is_artificial(static_cast<std::size_t>(cols), 0);

  int next_art = vars + rows;
  for (int i = 0; i < rows; ++i) {
    double sign = b[static_cast<std::size_t>(i)] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < vars; ++j)
      T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          sign * A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    T[static_cast<std::size_t>(i)][static_cast<std::size_t>(vars + i)] = sign;
    T[static_cast<std::size_t>(i)].back() = sign * b[static_cast<std::size_t>(i)];
    if (sign < 0) {
      T[static_cast<std::size_t>(i)][static_cast<std::size_t>(next_art)] = 1.0;
      basis[static_cast<std::size_t>(i)] = next_art;
      is_artificial[static_cast<std::size_t>(next_art)] = 1;
      ++next_art;
    } else {
      basis[static_cast<std::size_t>(i)] = vars + i;
    }
  }

  const int max_iter = 200 * cols + 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Reduced costs of min(sum of artificials): sum of rows whose basic
    // variable is artificial.
    std::vector<double> d(static_cast<std::size_t>(cols), 0.0);
    double w = 0;
    bool any_art = false;
    for (int i = 0; i < rows; ++i) {
      if (!is_artificial[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])]) continue;
      any_art = true;
      for (int j = 0; j < cols; ++j)
        d[static_cast<std::size_t>(j)] += T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      w += T[static_cast<std::size_t>(i)].back();
    }
    if (!any_art || w <= kFeasTol) {
      if (x) {
        x->assign(static_cast<std::size_t>(vars), 0.0);
        for (int i = 0; i < rows; ++i)
          if (basis[static_cast<std::size_t>(i)] < vars)
            (*x)[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
                T[static_cast<std::size_t>(i)].back();
      }
      return 0.0;
    }

    int enter = -1;
    for (int j = 0; j < vars + rows; ++j) {  // never re-enter artificials
      if (d[static_cast<std::size_t>(j)] > 1e-11) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) return w;  // optimal and infeasible

    int leave = -1;
    double best_ratio = 0;
    for (int i = 0; i < rows; ++i) {
      double a = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (a > 1e-11) {
        double ratio = T[static_cast<std::size_t>(i)].back() / a;
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return w;  // should not happen in phase 1

    double piv = T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(enter)];
    for (int j = 0; j < cols; ++j) T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(j)] /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == leave) continue;
      double f = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (f == 0) continue;
      for (int j = 0; j < cols; ++j)
        T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            f * T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(j)];
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n));
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g.push_back(std::exp(llo + (lhi - llo) * i / (n - 1)));
  return g;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Marginal: return "marginal";
    case Verdict::Unstable: return "unstable";
  }
  return "?";
}

Verdict single_queue_stability(double a, const std::vector<double>& c,
                               const std::vector<double>& p) {
  double avg = dot(p, c);
  double tol = 1e-9 * std::max({1.0, std::abs(avg), std::abs(a)});
  if (std::abs(avg - a) <= tol) return Verdict::Marginal;
  return avg > a ? Verdict::Stable : Verdict::Unstable;
}

NecessaryReport necessary_check(const NetworkParams& p,
                                const std::vector<double>& pi) {
  NecessaryReport rep;
  auto add = [&](const std::string& label, double inflow, int queue) {
    double avg = 0;
    for (int i = 0; i < p.num_modes(); ++i)
      avg += pi[static_cast<std::size_t>(i)] * p.cap(queue, i);
    NecessaryEntry e;
    e.label = label;
    e.inflow = inflow;
    e.capacity_avg = avg;
    e.margin = avg - inflow;
    e.pass = e.margin >= -1e-9;
    rep.entries.push_back(e);
  };
  switch (p.topology) {
    case Topology::Single:
      add("a <= avg capacity of queue 1", p.inflows[0], 0);
      break;
    case Topology::Tandem:
      add("a <= avg capacity of queue 1", p.inflows[0], 0);
      add("a <= avg capacity of queue 2", p.inflows[0], 1);
      break;
    case Topology::Merge:
      add("a1 <= avg capacity of queue 1", p.inflows[0], 0);
      add("a2 <= avg capacity of queue 2", p.inflows[1], 1);
      add("a1+a2 <= avg capacity of queue 3", p.inflows[0] + p.inflows[1], 2);
      break;
  }
  rep.pass = true;
  for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
  return rep;
}

std::optional<std::vector<double>> lp_feasibility_at_beta(
    double beta, const std::vector<double>& gaps, const GeneratorMatrix& g,
    double alpha_min, double* violation) {
  const int m = g.m;
  // Row sums of the generator vanish, so
  //   sum_j lambda_ij (alpha_j - alpha_i) = (Lambda alpha)_i
  // and the constraint is (beta diag(g) + Lambda) alpha <= -1.
  std::vector<std::vector<double>> M(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          g.rate(i, j) + (i == j ? beta * gaps[static_cast<std::size_t>(i)] : 0.0);

  std::vector<double> b(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double shift = 0;
    for (int j = 0; j < m; ++j)
      shift += M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * alpha_min;
    b[static_cast<std::size_t>(i)] = -1.0 - shift;
  }

  std::vector<double> x;
  double infeas = phase1_feasibility(M, b, &x);
  if (violation) *violation = infeas;
  if (infeas > kFeasTol) return std::nullopt;

  std::vector<double> alpha(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) alpha[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + alpha_min;

  // Residual polish: if rounding left max_i (M alpha)_i slightly above -1,
  // scaling alpha up restores it (the system is positively homogeneous in
  // the -1 bound direction).
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double row = 0;
    for (int j = 0; j < m; ++j)
      row += M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * alpha[static_cast<std::size_t>(j)];
    worst = std::max(worst, row);
  }
  if (worst > -1.0) {
    if (worst >= -1e-12) {
      if (violation) *violation = worst + 1.0;
      return std::nullopt;
    }
    double k = 1.0 / -worst;
    for (double& a : alpha) a *= k * (1 + 1e-12);
  }
  return alpha;
}

std::vector<double> lyapunov_weights(Topology t) {
  switch (t) {
    case Topology::Single: return {1.0};
    case Topology::Tandem: return {2.0, 1.0};
    case Topology::Merge: return {2.0, 2.0, 1.0};
  }
  return {};
}

namespace {

// log of max_i alpha_i exp(beta h^T q_upper) over the bounded region, plus
// the kappa-bar magnitudes; combined into the drift constant d in log space
// to survive large beta * h^T q.
struct DriftConstant {
  double log_d = -std::numeric_limits<double>::infinity();
  double value() const { return std::exp(log_d); }
};

DriftConstant bounded_region_constant(const std::vector<double>& alpha, double beta,
                                      const NetworkParams& p, const GeneratorMatrix& g,
                                      const RegionMinima& minima) {
  const int m = g.m;
  double amax = *std::max_element(alpha.begin(), alpha.end());
  double amin = *std::min_element(alpha.begin(), alpha.end());
  double c = 1.0 / amax;
  double total_in = 2.0 * p.total_inflow();

  double kappa_max = 0;
  for (int i = 0; i < m; ++i) {
    double trans = 0;
    for (int j = 0; j < m; ++j) trans += g.rate(i, j) * alpha[static_cast<std::size_t>(j)];
    double kappa = c * alpha[static_cast<std::size_t>(i)] +
                   alpha[static_cast<std::size_t>(i)] * beta *
                       (total_in - minima.bounded_region_min[static_cast<std::size_t>(i)]) +
                   trans;
    kappa_max = std::max(kappa_max, std::abs(kappa));
  }

  std::vector<double> h = lyapunov_weights(p.topology);
  std::vector<double> q_up;
  if (p.topology == Topology::Tandem)
    q_up = {minima.box.q_c, minima.box.bounds[1].hi};
  else
    q_up = {minima.box.q_c, minima.box.q_c, minima.box.bounds[2].hi};

  DriftConstant dc;
  if (kappa_max > 0)
    dc.log_d = std::log(amax) - std::log(amin) + beta * dot(h, q_up) + std::log(kappa_max);
  return dc;
}

}  // namespace

SufficientResult sufficient_check(const NetworkParams& p,
                                  const RegionMinima& minima,
                                  const GeneratorMatrix& g,
                                  const CertificateSettings& settings) {
  if (p.topology == Topology::Single)
    fail(ErrorCode::InvalidArgument,
         "single queue has an exact condition; no certificate search needed");
  const int m = g.m;
  SufficientResult res;
  res.gaps.resize(static_cast<std::size_t>(m));
  double total_in = 2.0 * p.total_inflow();
  for (int i = 0; i < m; ++i)
    res.gaps[static_cast<std::size_t>(i)] =
        total_in - minima.certificate_min[static_cast<std::size_t>(i)];

  res.infeasible.min_violation = std::numeric_limits<double>::infinity();

  auto try_beta = [&](double beta) -> bool {
    double viol = 0;
    auto alpha = lp_feasibility_at_beta(beta, res.gaps, g, settings.alpha_min, &viol);
    if (!alpha) {
      if (viol < res.infeasible.min_violation) {
        res.infeasible.min_violation = viol;
        res.infeasible.beta_at_min = beta;
      }
      return false;
    }
    Witness w;
    w.alpha = *alpha;
    w.beta = beta;
    w.drift_c = 1.0 / *std::max_element(alpha->begin(), alpha->end());
    w.d = bounded_region_constant(*alpha, beta, p, g, minima).value();
    res.witness = w;
    return true;
  };

  std::vector<double> grid = log_grid(settings.beta_min, settings.beta_max, settings.beta_points);
  int found = -1;
  for (int k = 0; k < static_cast<int>(grid.size()); ++k) {
    if (try_beta(grid[static_cast<std::size_t>(k)])) {
      found = k;
      break;
    }
  }
  // One refinement pass on the segment below the first feasible point (or
  // around the least-violating beta when nothing was feasible).
  double ref_lo, ref_hi;
  if (found >= 0) {
    ref_lo = found > 0 ? grid[static_cast<std::size_t>(found - 1)] : settings.beta_min;
    ref_hi = grid[static_cast<std::size_t>(found)];
  } else {
    double b = res.infeasible.beta_at_min > 0 ? res.infeasible.beta_at_min
                                              : std::sqrt(settings.beta_min * settings.beta_max);
    ref_lo = std::max(settings.beta_min, b / 3.0);
    ref_hi = std::min(settings.beta_max, b * 3.0);
  }
  if (ref_hi > ref_lo) {
    for (double beta : log_grid(ref_lo, ref_hi, 40)) {
      if (try_beta(beta)) break;
    }
  }
  return res;
}

std::vector<WitnessAuditRow> evaluate_witness_inequality(
    const std::vector<double>& alpha, double beta, const std::vector<double>& gaps,
    const GeneratorMatrix& g) {
  std::vector<WitnessAuditRow> rows;
  for (int i = 0; i < g.m; ++i) {
    double trans = 0;
    for (int j = 0; j < g.m; ++j)
      trans += g.rate(i, j) * (alpha[static_cast<std::size_t>(j)] - alpha[static_cast<std::size_t>(i)]);
    WitnessAuditRow r;
    r.mode = i + 1;
    r.lhs = alpha[static_cast<std::size_t>(i)] * beta * gaps[static_cast<std::size_t>(i)] + trans;
    r.satisfied = r.lhs <= -1.0 + 1e-9;
    rows.push_back(r);
  }
  return rows;
}

double drift_condition_audit(const Witness& witness, const NetworkParams& p,
                             const GeneratorMatrix& g, const RegionMinima& minima,
                             int grid_per_axis) {
  const int m = g.m;
  const auto& box = minima.box;
  std::vector<double> h = lyapunov_weights(p.topology);
  double amax = *std::max_element(witness.alpha.begin(), witness.alpha.end());
  double c = witness.drift_c;

  DriftConstant dc = bounded_region_constant(witness.alpha, witness.beta, p, g, minima);

  // Grid over the box, unbounded coordinates truncated at q_c + theta.
  std::vector<std::vector<double>> axes;
  for (const auto& iv : box.bounds) {
    double hi = std::isfinite(iv.hi) ? iv.hi : box.q_c + p.theta;
    std::vector<double> pts;
    for (int i = 0; i < grid_per_axis; ++i)
      pts.push_back(iv.lo + (hi - iv.lo) * i / (grid_per_axis - 1));
    if (box.q_c > iv.lo && box.q_c < hi) pts.push_back(box.q_c);
    std::sort(pts.begin(), pts.end());
    axes.push_back(pts);
  }

  std::vector<double> q_up;
  for (std::size_t k = 0; k < axes.size(); ++k) q_up.push_back(axes[k].back());
  double log_vmax = std::log(amax) + witness.beta * dot(h, q_up);

  std::vector<double> trans(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      trans[static_cast<std::size_t>(i)] += g.rate(i, j) * witness.alpha[static_cast<std::size_t>(j)];

  double total_in = 2.0 * p.total_inflow();
  double max_residual = -std::numeric_limits<double>::infinity();

  const int dim = static_cast<int>(axes.size());
  std::vector<double> q(static_cast<std::size_t>(dim));
  std::size_t n0 = axes[0].size();
  std::size_t n1 = dim > 1 ? axes[1].size() : 1;
  std::size_t n2 = dim > 2 ? axes[2].size() : 1;
  for (std::size_t a = 0; a < n0; ++a) {
    q[0] = axes[0][a];
    for (std::size_t b = 0; b < n1; ++b) {
      if (dim > 1) q[1] = axes[1][b];
      for (std::size_t cidx = 0; cidx < n2; ++cidx) {
        if (dim > 2) q[2] = axes[2][cidx];
        double s = witness.beta * dot(h, q);
        for (int i = 0; i < m; ++i) {
          double fsum = flow_sum(i, q, p);
          double kappa = c * witness.alpha[static_cast<std::size_t>(i)] +
                         witness.alpha[static_cast<std::size_t>(i)] * witness.beta *
                             (total_in - fsum) +
                         trans[static_cast<std::size_t>(i)];
          double term1 = 0;
          if (kappa != 0)
            term1 = (kappa > 0 ? 1.0 : -1.0) *
                    std::exp(std::log(std::abs(kappa)) + s - log_vmax);
          double term2 = std::exp(dc.log_d - log_vmax);
          max_residual = std::max(max_residual, term1 - term2);
        }
      }
    }
  }
  return max_residual;
}

double SpectralCdf::eval(double q, int mode) const {
  if (q < 0) return 0;
  std::complex<double> acc = 0;
  for (std::size_t k = 0; k < z.size(); ++k)
    acc += coef[k] * std::exp(z[k] * q) * phi[k][static_cast<std::size_t>(mode)];
  return p[static_cast<std::size_t>(mode)] + acc.real();
}

SpectralCdf single_queue_stationary_cdf(double a, const std::vector<double>& c,
                                        const GeneratorMatrix& g) {
  const int m = g.m;
  StationaryDistribution pi = stationary_distribution(g);
  double avg = dot(pi.p, c);
  if (avg <= a)
    fail(ErrorCode::UnstableQueue,
         "no stationary queue distribution: avg capacity " + std::to_string(avg) +
             " <= inflow " + std::to_string(a));
  int up_modes = 0;
  for (int i = 0; i < m; ++i) {
    double drift_i = a - c[static_cast<std::size_t>(i)];
    if (std::abs(drift_i) <= 1e-12 * std::max(1.0, std::abs(a)))
      fail(ErrorCode::ZeroDriftMode,
           "inflow equals capacity in mode " + std::to_string(i + 1));
    if (drift_i > 0) ++up_modes;
  }

  SpectralCdf out;
  out.p = pi.p;
  if (up_modes == 0) return out;  // all drifts negative: all mass at q = 0

  // z phi^T D = phi^T Lambda with D = diag(a - c) reduces to the standard
  // eigenproblem (D^{-1} Lambda^T) phi = z phi since D is invertible.
  Eigen::MatrixXd B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      B(i, j) = g.rate(j, i) / (a - c[static_cast<std::size_t>(i)]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::SingularBeyondRankOne, "eigen solve failed");

  double scale = B.cwiseAbs().maxCoeff();
  for (int k = 0; k < m; ++k) {
    std::complex<double> zk = es.eigenvalues()(k);
    if (zk.real() < -1e-9 * std::max(1.0, scale)) {
      out.z.push_back(zk);
      std::vector<std::complex<double>> col;
      for (int i = 0; i < m; ++i) col.push_back(es.eigenvectors()(i, k));
      out.phi.push_back(col);
    }
  }
  if (static_cast<int>(out.z.size()) != up_modes)
    fail(ErrorCode::SingularBeyondRankOne,
         "unexpected spectral structure: " + std::to_string(out.z.size()) +
             " decaying modes for " + std::to_string(up_modes) + " positive drifts");

  // Boundary conditions F_j(0) = 0 for every positive-drift mode j fix the
  // mixing coefficients.
  Eigen::MatrixXcd S(up_modes, up_modes);
  Eigen::VectorXcd rhs(up_modes);
  int row = 0;
  for (int j = 0; j < m; ++j) {
    if (a - c[static_cast<std::size_t>(j)] <= 0) continue;
    for (int k = 0; k < up_modes; ++k)
      S(row, k) = out.phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    rhs(row) = -pi.p[static_cast<std::size_t>(j)];
    ++row;
  }
  Eigen::VectorXcd coef = S.fullPivLu().solve(rhs);
  for (int k = 0; k < up_modes; ++k) out.coef.push_back(coef(k));
  return out;
}

}  // namespace fluidq
