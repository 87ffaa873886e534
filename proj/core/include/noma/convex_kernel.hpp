#pragma once

#include <string>
#include <utility>
#include <vector>

namespace noma {

/// Sparse affine expression sum_k coeff_k * x[var_k] + constant.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  AffineExpr() = default;
  AffineExpr(std::initializer_list<std::pair<int, double>> t, double c = 0.0)
      : terms(t), constant(c) {}
  static AffineExpr var(int v, double coeff = 1.0, double c = 0.0) {
    AffineExpr e;
    e.terms.emplace_back(v, coeff);
    e.constant = c;
    return e;
  }
  double eval(const std::vector<double>& x) const;
};

struct VarBound {
  double lo;
  double hi;
};

/// weight * (expr)^2 objective atom, weight >= 0.
struct SquareAtom {
  AffineExpr expr;
  double weight = 0.0;
};

/// weight * max(a, b) objective atom, weight > 0. Handled exactly through an
/// internal epigraph auxiliary, not smoothing.
struct MaxOfTwoAtom {
  AffineExpr a, b;
  double weight = 0.0;
};

/// expr(x) <= 0.
struct AffineLeqAtom {
  AffineExpr expr;
};

/// sum_j log2(1 + arg_j(x)) >= floor. Every arg must be nonnegative over the
/// variable boxes.
struct SumLogFloorAtom {
  std::vector<AffineExpr> args;
  double floor = 0.0;
};

/// sum_j s_j * log2(1 + y_j / s_j) >= floor over variable pairs (s_j, y_j),
/// with the closure value 0 at s_j = 0 (s is clamped at 1e-12 inside).
struct PerspectiveLogFloorAtom {
  std::vector<std::pair<int, int>> pairs;  ///< (s variable, y variable)
  double floor = 0.0;
};

/// Declarative convex subproblem: affine-plus-squares objective with
/// epigraph max terms, over box, affine, sum-log and perspective-log sets.
struct ConvexProblem {
  std::vector<VarBound> bounds;
  std::vector<double> linear;  ///< objective coefficients, one per variable
  double objective_constant = 0.0;
  std::vector<SquareAtom> squares;
  std::vector<MaxOfTwoAtom> maxima;
  std::vector<AffineLeqAtom> affine_leq;
  std::vector<SumLogFloorAtom> log_floors;
  std::vector<PerspectiveLogFloorAtom> perspective_floors;

  int n() const { return static_cast<int>(bounds.size()); }
  int add_var(double lo, double hi);
  /// True objective (maxima evaluated exactly) at a point.
  double objective_value(const std::vector<double>& x) const;
  /// Largest constraint violation (boxes, affine, log and perspective floors).
  double max_violation(const std::vector<double>& x) const;
};

enum class KernelStatus { kOptimal, kInfeasible, kNumericFailure };

struct KernelResult {
  KernelStatus status = KernelStatus::kNumericFailure;
  std::vector<double> point;      ///< declared variables only
  double objective_value = 0.0;
  double kkt_residual = 0.0;      ///< duality-gap surrogate at termination
  int newton_steps = 0;
};

struct KernelOptions {
  double tol = 1e-8;       ///< target duality-gap surrogate
  double feas_tol = 1e-8;  ///< permitted constraint violation
  int max_newton_per_stage = 500;
  double mu_initial = 1.0;
  double mu_shrink = 0.1;
};

/// Log-barrier interior-point solve with a phase-1 feasibility stage.
/// Deterministic for fixed inputs. `warm_start`, when provided and strictly
/// feasible, skips phase 1.
KernelResult kernel_solve(const ConvexProblem& problem, const KernelOptions& opts = {},
                          const std::vector<double>* warm_start = nullptr);

/// Debug dump of a problem instance ("cvxprob-v1").
std::string cvxprob_to_json(const ConvexProblem& p);

/// The perspective extension s * log2(1 + y/s) used by the kernel and the
/// big-M rate constraint: s is clamped at 1e-12 and the closure value at
/// s = 0 is 0.
double perspective_log2(double s, double y);

}  // namespace noma
