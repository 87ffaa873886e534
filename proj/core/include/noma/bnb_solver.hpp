#pragma once

#include <utility>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/channel.hpp"
#include "noma/convex_kernel.hpp"
#include "noma/report.hpp"

namespace noma {

/// Search rectangle over the relaxed variables. Dimension k = i * 2M + j
/// holds gamma_{i,j} for j < M and the relaxed scheduling share s_{i,j-M}
/// for j >= M. `init_width` is the root box edge length per dimension, used
/// to normalize the branching rule.
struct Box {
  int n_subcarriers = 0;
  int n_users = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> init_width;

  int dims() const { return static_cast<int>(lower.size()); }
  int dim_gamma(int i, int m) const { return i * 2 * n_users + m; }
  int dim_sbar(int i, int m) const { return i * 2 * n_users + n_users + m; }
};

/// Relaxed solution (scheduling shares and SINR targets).
struct RelaxedPoint {
  int n_subcarriers = 0;
  int n_users = 0;
  std::vector<double> gamma;  ///< i-major, n_subcarriers * n_users
  std::vector<double> sbar;

  size_t idx(int i, int m) const { return static_cast<size_t>(i) * n_users + m; }
};

struct BnbOptions {
  double theta = 0.0;        ///< penalty factor; 0 = size it from the initial point
  double eps = 0.01;         ///< UBD - LBD stopping gap, watts
  long node_budget = 200000;
  int c7_limit = 2;          ///< scheduled users per subcarrier
  double recover_threshold = 1e-6;
  double kernel_tol = 1e-7;
  double kernel_feas_tol = 1e-6;
  bool parallel_children = true;
};

struct BnbResult {
  Allocation allocation;
  SolverReport report;
  RelaxedPoint incumbent;
};

/// Penalized relaxed objective: power surrogate plus theta * sum(gamma - sbar*gamma).
double penalty_objective(const RelaxedPoint& pt, double theta, const Scenario& scenario);

/// Convex lower envelope of sign * v * w over [vl, vu] x [wl, wu].
double mccormick_lower(int sign, double v, double w, double vl, double vu, double wl, double wu);

/// Root rectangle: gamma in [0, 2^{R_m} - 1], sbar in [0, 1].
Box initial_box(const Scenario& scenario);

/// Bisects the longest normalized edge (ties to the lowest index).
std::pair<Box, Box> branch(const Box& box);

/// Convex lower-bound subproblem on the rectangle: linear gamma terms,
/// McCormick epigraphs for the bilinear terms, per-user sum-log rate floors
/// and the per-subcarrier scheduling cap.
ConvexProblem lower_bound_problem(const Box& box, double theta, const Scenario& scenario,
                                  int c7_limit = 2);

/// Maps a relaxed optimum to a binary allocation: schedule where gamma
/// clears the threshold, order SIC by threshold, price with the closed-form
/// powers. Throws std::runtime_error if the mapping breaks the scheduling cap.
Allocation recover_binary(const RelaxedPoint& pt, const Scenario& scenario,
                          double threshold = 1e-6, int c7_limit = 2);

/// Globally optimal allocation via branch and bound.
BnbResult solve_bnb(const Scenario& scenario, const BnbOptions& opts = {});

}  // namespace noma
