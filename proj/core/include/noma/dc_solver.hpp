#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/channel.hpp"
#include "noma/convex_kernel.hpp"
#include "noma/report.hpp"

namespace noma {

/// One iterate of the successive convex approximation: relaxed scheduling,
/// SINR targets, and the big-M auxiliaries gamma_tilde = gamma * s.
struct DcIterate {
  int n_subcarriers = 0;
  int n_users = 0;
  std::vector<double> s;
  std::vector<double> gamma;
  std::vector<double> gamma_tilde;
  double objective = 0.0;  ///< penalized value G1 - G2
  int k = 0;

  size_t idx(int i, int m) const { return static_cast<size_t>(i) * n_users + m; }
};

struct DcOptions {
  double eta = 0.0;  ///< penalty factor; 0 = size it from the initial point
  double eps = 0.01;
  int k_max = 100;
  int c7_limit = 2;
  double kernel_tol = 1e-7;
  double kernel_feas_tol = 1e-6;
  double round_threshold = 0.5;
};

struct DcResult {
  Allocation allocation;
  SolverReport report;
  DcIterate final_iterate;
};

/// The two convex halves of the penalized objective. G1 - G2 equals the
/// big-M objective plus eta * sum(s - s^2).
std::pair<double, double> dc_split(const DcIterate& pt, double eta, const Scenario& scenario);

/// Convex majorant subproblem at the anchor: G1 minus the affine expansion
/// of G2, over the big-M constraint set with the perspective rate floors.
/// Variable layout: s, gamma, gamma_tilde blocks of n_subcarriers*n_users.
ConvexProblem linearized_subproblem(const DcIterate& anchor, double eta, const Scenario& scenario,
                                    int c7_limit = 2);

/// Power-objective value of the feasibility-stage minimizer; the theta/eta
/// sizing scale ("comparable to the objective").
double initial_power_scale(const Scenario& scenario, int c7_limit = 2);

/// Suboptimal solver: successive convex approximation, rounding, and an
/// exact rate re-solve on the rounded schedule.
DcResult solve_dc(const Scenario& scenario, const DcOptions& opts = {});

/// Minimum-power rates for a fixed binary schedule (every scheduled entry
/// may carry rate; unscheduled entries are pinned to zero). Used by the
/// rounding stage and by the fixed-pairing baselines.
struct FixedScheduleResult {
  Allocation allocation;
  SolveStatus status = SolveStatus::kNumericFailure;
  int iterations = 0;
};
FixedScheduleResult solve_rates_fixed_schedule(const Scenario& scenario,
                                               const std::vector<std::uint8_t>& sched,
                                               const DcOptions& opts = {});

}  // namespace noma
