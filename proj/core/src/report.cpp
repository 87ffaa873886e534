#include "noma/report.hpp"

namespace noma {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "OPTIMAL";
    case SolveStatus::kBudget: return "BUDGET";
    case SolveStatus::kInfeasible: return "INFEASIBLE";
    case SolveStatus::kInfeasibleRounding: return "INFEASIBLE_ROUNDING";
    case SolveStatus::kNumericFailure: return "NUMERIC_FAILURE";
  }
  return "UNKNOWN";
}

}  // namespace noma
