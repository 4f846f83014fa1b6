#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fluidq/ctmc.hpp"
#include "fluidq/netmodel.hpp"
#include "fluidq/regions.hpp"

namespace fluidq {

enum class Verdict { Stable, Marginal, Unstable };
const char* verdict_name(Verdict v);

// Exact single-queue condition: stable iff sum_i p_i c_i > a. Equality is
// reported as marginal rather than certified stable.
Verdict single_queue_stability(double a, const std::vector<double>& c,
                               const std::vector<double>& p);

struct NecessaryEntry {
  std::string label;
  double inflow = 0;        // veh/hr
  double capacity_avg = 0;  // sum_i p_i c_ji, veh/hr
  double margin = 0;        // capacity_avg - inflow
  bool pass = false;        // margin >= 0 (non-strict)
};

struct NecessaryReport {
  std::vector<NecessaryEntry> entries;
  bool pass = false;
};

NecessaryReport necessary_check(const NetworkParams& p,
                                const std::vector<double>& pi);

// Foster-Lyapunov certificate for V(i,q) = alpha_i exp(beta h^T q).
struct Witness {
  std::vector<double> alpha;
  double beta = 0;
  double drift_c = 0;  // 1 / max alpha_i
  double d = 0;        // bounded-region constant
};

struct InfeasibleInfo {
  double min_violation = 0;  // smallest phase-1 residual over the beta grid
  double beta_at_min = 0;
};

struct SufficientResult {
  std::optional<Witness> witness;
  InfeasibleInfo infeasible;  // populated when no witness was found
  std::vector<double> gaps;   // per mode: 2 * total inflow - F(i)
};

struct CertificateSettings {
  double beta_min = 1e-5;
  double beta_max = 10.0;
  int beta_points = 120;
  double alpha_min = 1e-3;
};

// Fixed-beta slice of the bilinear condition: find alpha >= alpha_min with
//   alpha_i * beta * g_i + sum_j lambda_ij alpha_j <= -1   for all i,
// via phase-1 linear feasibility. Returns the alpha vector, or nullopt with
// the attained infeasibility in *violation.
std::optional<std::vector<double>> lp_feasibility_at_beta(
    double beta, const std::vector<double>& gaps, const GeneratorMatrix& g,
    double alpha_min, double* violation = nullptr);

// Scans beta over a log grid (then one refinement pass below the first
// feasible point) and solves the linear-in-alpha problem at each beta.
// Smallest feasible beta wins.
SufficientResult sufficient_check(const NetworkParams& p,
                                  const RegionMinima& minima,
                                  const GeneratorMatrix& g,
                                  const CertificateSettings& settings = {});

// Per-mode left-hand side of the certificate inequality at a given
// (alpha, beta); used to audit externally supplied witnesses.
struct WitnessAuditRow {
  int mode = 0;  // 1-based in reports
  double lhs = 0;
  bool satisfied = false;  // lhs <= -1
};

std::vector<WitnessAuditRow> evaluate_witness_inequality(
    const std::vector<double>& alpha, double beta, const std::vector<double>& gaps,
    const GeneratorMatrix& g);

// Evaluates LV(i,q) + c V(i,q) - d over a grid of the invariant box (all
// modes) in log space and returns the maximum residual normalized by the
// largest V on the grid. Nonpositive for a sound certificate.
double drift_condition_audit(const Witness& witness, const NetworkParams& p,
                             const GeneratorMatrix& g, const RegionMinima& minima,
                             int grid_per_axis);

// Weight vector h of the certificate Lyapunov function for a topology.
std::vector<double> lyapunov_weights(Topology t);

// Stationary distribution of the stable single queue: F_j(q) = P(Q<=q, I=j)
// from the generalized eigenproblem z phi^T D = phi^T Lambda with
// D = diag(a - c_i).
struct SpectralCdf {
  std::vector<double> p;  // mode probabilities (the z = 0 term)
  std::vector<std::complex<double>> z;                 // Re z < 0 eigenvalues
  std::vector<std::vector<std::complex<double>>> phi;  // matching eigenvectors
  std::vector<std::complex<double>> coef;

  double eval(double q, int mode) const;
};

SpectralCdf single_queue_stationary_cdf(double a, const std::vector<double>& c,
                                        const GeneratorMatrix& g);

}  // namespace fluidq
