#include "fluidq/ctmc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "fluidq/error.hpp"
#include "fluidq/rng.hpp"

namespace fluidq {

namespace {

// Strong connectivity of the off-diagonal support graph: every node reachable
// from node 0 in the graph and in its reverse.
bool strongly_connected(const GeneratorMatrix& g) {
  const int m = g.m;
  auto reach_all = [&](bool reversed) {
    std::vector<char> seen(m, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < m; ++v) {
        if (v == u || seen[v]) continue;
        double r = reversed ? g.rate(v, u) : g.rate(u, v);
        if (r > 0) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == m;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::RowSumNonzero: return "RowSumNonzero";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::SingularBeyondRankOne: return "SingularBeyondRankOne";
    case ErrorCode::StateOutOfDomain: return "StateOutOfDomain";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::UnstableQueue: return "UnstableQueue";
    case ErrorCode::ZeroDriftMode: return "ZeroDriftMode";
    case ErrorCode::ClampBudgetExceeded: return "ClampBudgetExceeded";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

int ModePath::mode_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return modes[static_cast<std::size_t>(it - jump_times.begin())];
}

std::vector<double> ModePath::durations(int m) const {
  std::vector<double> d(m, 0.0);
  double prev = 0;
  for (std::size_t k = 0; k < jump_times.size(); ++k) {
    d[static_cast<std::size_t>(modes[k])] += jump_times[k] - prev;
    prev = jump_times[k];
  }
  d[static_cast<std::size_t>(modes.back())] += horizon - prev;
  return d;
}

GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& rates) {
  const int m = static_cast<int>(rates.size());
  if (m < 1) fail(ErrorCode::InvalidArgument, "generator must have at least one mode");
  GeneratorMatrix g;
  g.m = m;
  g.rates.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rates[i].size()) != m)
      fail(ErrorCode::InvalidArgument, "generator matrix must be square");
    double row_sum = 0;
    for (int j = 0; j < m; ++j) {
      double r = rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (i != j && r < 0)
        fail(ErrorCode::NegativeOffDiagonal,
             "rate(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                 ") = " + std::to_string(r));
      g.rates[static_cast<std::size_t>(i) * m + j] = r;
      row_sum += r;
    }
    if (std::abs(row_sum) > 1e-12)
      fail(ErrorCode::RowSumNonzero,
           "row " + std::to_string(i + 1) + " sums to " + std::to_string(row_sum));
  }
  if (m > 1 && !strongly_connected(g))
    fail(ErrorCode::Reducible, "rate-support digraph is not strongly connected");
  return g;
}

StationaryDistribution stationary_distribution(const GeneratorMatrix& g) {
  const int m = g.m;
  Eigen::MatrixXd A(m + 1, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) A(j, i) = g.rate(i, j);  // Lambda^T
  for (int i = 0; i < m; ++i) A(m, i) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  b(m) = 1.0;

  auto qr = A.completeOrthogonalDecomposition();
  if (qr.rank() < m)
    fail(ErrorCode::SingularBeyondRankOne,
         "generator kernel has dimension > 1; stationary distribution not unique");
  Eigen::VectorXd p = qr.solve(b);

  StationaryDistribution out;
  out.p.assign(p.data(), p.data() + m);
  double sum = 0;
  for (double& x : out.p) {
    if (x < 0 && x > -1e-12) x = 0;
    sum += x;
  }
  for (double& x : out.p) x /= sum;

  double res = 0;
  for (int j = 0; j < m; ++j) {
    double acc = 0;
    for (int i = 0; i < m; ++i) acc += out.p[static_cast<std::size_t>(i)] * g.rate(i, j);
    res = std::max(res, std::abs(acc));
  }
  out.residual = res;
  if (res > 1e-10)
    fail(ErrorCode::SingularBeyondRankOne,
         "stationary solve residual " + std::to_string(res) + " exceeds 1e-10");
  return out;
}

ModePath sample_path(const GeneratorMatrix& g, int i0, double horizon,
                     std::uint64_t seed) {
  if (i0 < 0 || i0 >= g.m) fail(ErrorCode::InvalidArgument, "initial mode out of range");
  if (horizon <= 0) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  ModePath path;
  path.horizon = horizon;
  path.seed = seed;
  path.modes.push_back(i0);
  SplitMix64 rng(seed);
  std::vector<double> weights(static_cast<std::size_t>(g.m));
  double t = 0;
  int mode = i0;
  while (true) {
    double exit_rate = -g.rate(mode, mode);
    if (exit_rate <= 0) break;  // absorbing only possible when m == 1
    t += rng.exponential(exit_rate);
    if (t >= horizon) break;
    for (int j = 0; j < g.m; ++j)
      weights[static_cast<std::size_t>(j)] = (j == mode) ? 0.0 : g.rate(mode, j);
    mode = rng.pick_weighted(weights.data(), g.m);
    path.jump_times.push_back(t);
    path.modes.push_back(mode);
  }
  return path;
}

}  // namespace fluidq
