#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/channel.hpp"
#include "noma/dc_solver.hpp"
#include "noma/report.hpp"

namespace noma {

struct OmaOptions {
  bool scale_noise_with_bw = false;  ///< rescale noise with the new spacing
  DcOptions dc;
};

struct OmaResult {
  Allocation allocation;   ///< on the regenerated grid
  SolverReport report;
  Scenario oma_scenario;   ///< M-subcarrier grid the baseline ran on
  /// Exact minimum of the one-subcarrier-per-user assignment, available when
  /// users and subcarriers match one to one; a cross-check on the solver.
  std::optional<double> assignment_value_w;
};

/// Baseline 1: orthogonal scheduling. The grid is regenerated with M
/// subcarriers (spacing rescaled by N_F/M) and the solver runs with a
/// one-user-per-subcarrier cap.
OmaResult solve_oma(const Scenario& scenario, const OmaOptions& opts = {});

/// Baseline 2: a uniformly drawn feasible pairing (every user covered, cap
/// respected), rates then solved exactly for that fixed schedule.
DcResult solve_random_pairing(const Scenario& scenario, std::uint64_t seed,
                              const DcOptions& opts = {});

struct EqualRateOptions {
  int exact_cutoff = 16;  ///< enumerate schedules exactly when N_F*M <= cutoff
  DcOptions dc;           ///< only c7_limit is read
};

/// Baseline 3: each user splits its demand equally over its subcarriers.
/// Exhaustive over schedules at desk scale, greedy with swap descent above
/// the cutoff (report flags the heuristic).
DcResult solve_equal_rate(const Scenario& scenario, const EqualRateOptions& opts = {});

struct OracleResult {
  Allocation allocation;
  double value_w = 0.0;
};

/// Exhaustive grid search over schedules and per-subcarrier rate splits.
/// Refuses instances beyond N_F <= 3, M <= 4, grid_step >= 0.25.
OracleResult brute_force_oracle(const Scenario& scenario, double grid_step);

/// Lipschitz bound on the power change induced by perturbing every
/// per-subcarrier rate by up to grid_step; the oracle's resolution slack.
double oracle_grid_slack(const Scenario& scenario, double grid_step);

/// Hungarian algorithm; returns the minimum total cost and optionally the
/// chosen column per row. Square matrices only.
double min_cost_assignment(const std::vector<std::vector<double>>& cost,
                           std::vector<int>* pick = nullptr);

}  // namespace noma
