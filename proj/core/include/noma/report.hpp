#pragma once

#include <string>
#include <vector>

namespace noma {

enum class SolveStatus {
  kOptimal,            ///< converged within tolerance
  kBudget,             ///< iteration or node budget exhausted
  kInfeasible,
  kInfeasibleRounding, ///< a rounded schedule could not be repaired
  kNumericFailure,
};

const char* to_string(SolveStatus s);

/// Solve trace shared by every solver: bound or objective sequences,
/// iteration count, status, and the achieved total power.
struct SolverReport {
  std::string method;
  SolveStatus status = SolveStatus::kNumericFailure;
  long iterations = 0;
  double value_w = 0.0;
  std::vector<double> lbd_trace;        ///< branch-and-bound lower bounds
  std::vector<double> ubd_trace;        ///< branch-and-bound upper bounds
  std::vector<double> objective_trace;  ///< per-iteration penalized objective
  double theta = 0.0;
  double eta = 0.0;
  bool heuristic = false;  ///< result came from a heuristic search stage
};

}  // namespace noma
