#include "noma/convex_kernel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace noma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453094;
constexpr double kSClamp = 1e-12;      // perspective regularization floor
constexpr double kFixedWidth = 1e-14;  // boxes narrower than this pin the variable
constexpr double kInteriorTau = 1e-6;  // phase-1 early exit margin

double clamped(double s) { return s < kSClamp ? kSClamp : s; }

double perspective_value(double s, double y) {
  s = clamped(s);
  return s * std::log2(1.0 + y / s);
}

// Internal barrier problem. All constraints are kept as slack >= 0 with
// slack = relax - e(x) for affine rows and slack = G(x) - floor + relax for
// concave floors (sum of logs, perspectives, and a linear part).
struct Floor {
  std::vector<std::pair<double, AffineExpr>> logs;  // weight, argument
  std::vector<std::pair<int, int>> pairs;           // (s, y) variables
  AffineExpr lin;                                   // enters G(x) additively
  double floor = 0.0;
};

struct Barrier {
  std::vector<VarBound> bounds;
  std::vector<double> c;
  std::vector<SquareAtom> squares;
  std::vector<AffineExpr> ineq;  // e(x) <= 0
  std::vector<Floor> floors;
  double relax = 0.0;

  int n() const { return static_cast<int>(bounds.size()); }
  int barrier_count() const {
    int m = static_cast<int>(ineq.size() + floors.size());
    for (const auto& b : bounds) {
      if (std::isfinite(b.lo)) ++m;
      if (std::isfinite(b.hi)) ++m;
    }
    return m;
  }
};

double floor_slack(const Barrier& B, const Floor& fl, const Eigen::VectorXd& x, bool* domain_ok) {
  double g = -fl.floor + B.relax + fl.lin.constant;
  for (const auto& [v, coeff] : fl.lin.terms) g += coeff * x[v];
  for (const auto& [w, arg] : fl.logs) {
    double a = arg.constant;
    for (const auto& [v, coeff] : arg.terms) a += coeff * x[v];
    if (1.0 + a <= 0.0) {
      if (domain_ok) *domain_ok = false;
      return -1.0;
    }
    g += w * std::log2(1.0 + a);
  }
  for (const auto& [sv, yv] : fl.pairs) g += perspective_value(x[sv], x[yv]);
  return g;
}

// Barrier objective value; false when outside the domain or a slack is not
// strictly positive.
bool barrier_value(const Barrier& B, const Eigen::VectorXd& x, double mu, double* out) {
  double f = 0.0;
  for (int i = 0; i < B.n(); ++i) f += B.c[i] * x[i];
  for (const auto& sq : B.squares) {
    double e = sq.expr.constant;
    for (const auto& [v, coeff] : sq.expr.terms) e += coeff * x[v];
    f += sq.weight * e * e;
  }
  for (int i = 0; i < B.n(); ++i) {
    const auto& b = B.bounds[i];
    if (std::isfinite(b.lo)) {
      double s = x[i] - b.lo;
      if (s <= 0.0) return false;
      f -= mu * std::log(s);
    }
    if (std::isfinite(b.hi)) {
      double s = b.hi - x[i];
      if (s <= 0.0) return false;
      f -= mu * std::log(s);
    }
  }
  for (const auto& e : B.ineq) {
    double val = e.constant;
    for (const auto& [v, coeff] : e.terms) val += coeff * x[v];
    double s = B.relax - val;
    if (s <= 0.0) return false;
    f -= mu * std::log(s);
  }
  for (const auto& fl : B.floors) {
    bool ok = true;
    double s = floor_slack(B, fl, x, &ok);
    if (!ok || s <= 0.0) return false;
    f -= mu * std::log(s);
  }
  *out = f;
  return true;
}

struct Derivs {
  Eigen::VectorXd grad;
  std::vector<Eigen::Triplet<double>> trips;
};

// Gradient and Hessian of the barrier objective. Assumes x is interior.
void barrier_derivs(const Barrier& B, const Eigen::VectorXd& x, double mu, Derivs& d) {
  const int n = B.n();
  d.grad.setZero(n);
  d.trips.clear();

  for (int i = 0; i < n; ++i) d.grad[i] += B.c[i];

  for (const auto& sq : B.squares) {
    double e = sq.expr.constant;
    for (const auto& [v, coeff] : sq.expr.terms) e += coeff * x[v];
    for (const auto& [v, coeff] : sq.expr.terms) d.grad[v] += 2.0 * sq.weight * e * coeff;
    for (const auto& [v1, c1] : sq.expr.terms)
      for (const auto& [v2, c2] : sq.expr.terms)
        d.trips.emplace_back(v1, v2, 2.0 * sq.weight * c1 * c2);
  }

  for (int i = 0; i < n; ++i) {
    const auto& b = B.bounds[i];
    double h = 0.0;
    if (std::isfinite(b.lo)) {
      double s = x[i] - b.lo;
      d.grad[i] -= mu / s;
      h += mu / (s * s);
    }
    if (std::isfinite(b.hi)) {
      double s = b.hi - x[i];
      d.grad[i] += mu / s;
      h += mu / (s * s);
    }
    if (h != 0.0) d.trips.emplace_back(i, i, h);
  }

  for (const auto& e : B.ineq) {
    double val = e.constant;
    for (const auto& [v, coeff] : e.terms) val += coeff * x[v];
    double s = B.relax - val;
    double gs = mu / s;
    for (const auto& [v, coeff] : e.terms) d.grad[v] += gs * coeff;
    double hs = mu / (s * s);
    for (const auto& [v1, c1] : e.terms)
      for (const auto& [v2, c2] : e.terms) d.trips.emplace_back(v1, v2, hs * c1 * c2);
  }

  std::vector<std::pair<int, double>> gG;  // sparse gradient of G for one floor
  for (const auto& fl : B.floors) {
    bool ok = true;
    double s = floor_slack(B, fl, x, &ok);
    gG.clear();
    for (const auto& [v, coeff] : fl.lin.terms) gG.emplace_back(v, coeff);
    for (const auto& [w, arg] : fl.logs) {
      double a = arg.constant;
      for (const auto& [v, coeff] : arg.terms) a += coeff * x[v];
      double da = (w / kLn2) / (1.0 + a);
      for (const auto& [v, coeff] : arg.terms) gG.emplace_back(v, da * coeff);
      // -d2G/da2 term of the barrier Hessian: mu / s * (w/ln2) / (1+a)^2
      double curv = (mu / s) * (w / kLn2) / ((1.0 + a) * (1.0 + a));
      for (const auto& [v1, c1] : arg.terms)
        for (const auto& [v2, c2] : arg.terms) d.trips.emplace_back(v1, v2, curv * c1 * c2);
    }
    for (const auto& [sv, yv] : fl.pairs) {
      double sc = clamped(x[sv]);
      double y = x[yv];
      double denom = sc + y;
      double dphi_s = (std::log(1.0 + y / sc) - y / denom) / kLn2;
      double dphi_y = (sc / denom) / kLn2;
      gG.emplace_back(sv, dphi_s);
      gG.emplace_back(yv, dphi_y);
      double k = (mu / s) / (kLn2 * denom * denom);
      d.trips.emplace_back(sv, sv, k * y * y / sc);
      d.trips.emplace_back(sv, yv, -k * y);
      d.trips.emplace_back(yv, sv, -k * y);
      d.trips.emplace_back(yv, yv, k * sc);
    }
    double gs = mu / s;
    for (const auto& [v, val] : gG) d.grad[v] -= gs * val;
    double hs = mu / (s * s);
    for (const auto& [v1, c1] : gG)
      for (const auto& [v2, c2] : gG) d.trips.emplace_back(v1, v2, hs * c1 * c2);
  }
}

// Largest step keeping the affine-type slacks positive; floors are covered by
// the backtracking loop (their feasible set is an interval in the step size).
double max_affine_step(const Barrier& B, const Eigen::VectorXd& x, const Eigen::VectorXd& dir) {
  double amax = kInf;
  for (int i = 0; i < B.n(); ++i) {
    const auto& b = B.bounds[i];
    if (std::isfinite(b.lo) && dir[i] < 0.0) amax = std::min(amax, (b.lo - x[i]) / dir[i]);
    if (std::isfinite(b.hi) && dir[i] > 0.0) amax = std::min(amax, (b.hi - x[i]) / dir[i]);
  }
  for (const auto& e : B.ineq) {
    double val = e.constant, dv = 0.0;
    for (const auto& [v, coeff] : e.terms) {
      val += coeff * x[v];
      dv += coeff * dir[v];
    }
    double s = B.relax - val;
    if (dv > 0.0) amax = std::min(amax, s / dv);
  }
  return amax;
}

struct BarrierOutcome {
  Eigen::VectorXd x;
  double mu_final = 0.0;
  double decrement2 = kInf;
  int steps = 0;
  bool stalled = false;
  int signal = 0;  // from the stage callback
};

// Damped-Newton path following. `stage_check` runs after every centered stage
// and may stop the loop early (nonzero return).
BarrierOutcome run_barrier(const Barrier& B, Eigen::VectorXd x, const KernelOptions& opts,
                           double gap_target,
                           const std::function<int(const Eigen::VectorXd&, double)>& stage_check) {
  BarrierOutcome out;
  const int n = B.n();
  const int m = B.barrier_count();
  const double mu_floor = 1e-13;
  double mu = opts.mu_initial;

  Derivs d;
  Eigen::SparseMatrix<double> H(n, n);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  while (true) {
    double stage_tol = std::max(1e-13, std::min(1e-5, 0.05 * m * mu));
    double dec2 = kInf;
    for (int it = 0; it < opts.max_newton_per_stage; ++it) {
      double f0;
      if (!barrier_value(B, x, mu, &f0)) {
        out.stalled = true;
        break;
      }
      barrier_derivs(B, x, mu, d);
      H.setFromTriplets(d.trips.begin(), d.trips.end());

      Eigen::VectorXd step;
      double ridge = 0.0;
      bool solved = false;
      for (int attempt = 0; attempt < 8; ++attempt) {
        if (ridge > 0.0) {
          Eigen::SparseMatrix<double> Hr = H;
          for (int i = 0; i < n; ++i) Hr.coeffRef(i, i) += ridge;
          ldlt.compute(Hr);
        } else {
          ldlt.compute(H);
        }
        if (ldlt.info() == Eigen::Success) {
          step = ldlt.solve(-d.grad);
          if (step.allFinite() && d.grad.dot(step) < 0.0) {
            solved = true;
            break;
          }
        }
        ridge = ridge == 0.0 ? 1e-10 : ridge * 100.0;
      }
      if (!solved) {
        out.stalled = true;
        break;
      }

      dec2 = -d.grad.dot(step);
      if (0.5 * dec2 <= stage_tol) break;

      double alpha = std::min(1.0, 0.995 * max_affine_step(B, x, step));
      double slope = d.grad.dot(step);
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd cand = x + alpha * step;
        double fc;
        if (barrier_value(B, cand, mu, &fc) && fc <= f0 + 0.25 * alpha * slope) {
          x.swap(cand);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      ++out.steps;
      if (!accepted) {
        out.stalled = true;
        break;
      }
    }
    out.decrement2 = dec2;
    out.mu_final = mu;
    if (stage_check) {
      int sig = stage_check(x, mu);
      if (sig != 0) {
        out.signal = sig;
        break;
      }
    }
    if (m * mu <= gap_target || mu <= mu_floor) break;
    mu *= opts.mu_shrink;
    out.stalled = false;
  }
  out.x = std::move(x);
  return out;
}

struct Reduction {
  std::vector<int> to_red;        // original -> reduced index or -1
  std::vector<double> fixed_val;  // value when pinned (NaN otherwise)
  std::vector<int> to_orig;       // reduced -> original
  int n_red = 0;
};

// Rewrites an expression over the reduced variables; pinned variables fold
// into the constant.
AffineExpr reduce_expr(const AffineExpr& e, const Reduction& red) {
  AffineExpr out;
  out.constant = e.constant;
  for (const auto& [v, coeff] : e.terms) {
    if (red.to_red[v] >= 0)
      out.terms.emplace_back(red.to_red[v], coeff);
    else
      out.constant += coeff * red.fixed_val[v];
  }
  return out;
}

}  // namespace

double perspective_log2(double s, double y) { return perspective_value(s, y); }

double AffineExpr::eval(const std::vector<double>& x) const {
  double v = constant;
  for (const auto& [var, coeff] : terms) v += coeff * x[var];
  return v;
}

int ConvexProblem::add_var(double lo, double hi) {
  bounds.push_back({lo, hi});
  linear.push_back(0.0);
  return static_cast<int>(bounds.size()) - 1;
}

double ConvexProblem::objective_value(const std::vector<double>& x) const {
  double f = objective_constant;
  for (int i = 0; i < n(); ++i) f += linear[i] * x[i];
  for (const auto& sq : squares) {
    double e = sq.expr.eval(x);
    f += sq.weight * e * e;
  }
  for (const auto& mx : maxima) f += mx.weight * std::max(mx.a.eval(x), mx.b.eval(x));
  return f;
}

double ConvexProblem::max_violation(const std::vector<double>& x) const {
  double v = 0.0;
  for (int i = 0; i < n(); ++i) {
    v = std::max(v, bounds[i].lo - x[i]);
    v = std::max(v, x[i] - bounds[i].hi);
  }
  for (const auto& e : affine_leq) v = std::max(v, e.expr.eval(x));
  for (const auto& fl : log_floors) {
    double g = 0.0;
    for (const auto& a : fl.args) g += std::log2(std::max(1e-300, 1.0 + a.eval(x)));
    v = std::max(v, fl.floor - g);
  }
  for (const auto& fl : perspective_floors) {
    double g = 0.0;
    for (const auto& [sv, yv] : fl.pairs) g += perspective_value(x[sv], x[yv]);
    v = std::max(v, fl.floor - g);
  }
  return v;
}

KernelResult kernel_solve(const ConvexProblem& problem, const KernelOptions& opts,
                          const std::vector<double>* warm_start) {
  const int n = problem.n();
  if (static_cast<int>(problem.linear.size()) != n)
    throw std::invalid_argument("kernel: linear coefficient size mismatch");
  for (const auto& b : problem.bounds)
    if (!(b.lo <= b.hi)) throw std::invalid_argument("kernel: empty variable box");
  for (const auto& mx : problem.maxima)
    if (!(mx.weight > 0.0)) throw std::invalid_argument("kernel: max atom weight must be positive");

  KernelResult res;

  // Pin degenerate boxes.
  Reduction red;
  red.to_red.assign(n, -1);
  red.fixed_val.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < n; ++i) {
    if (problem.bounds[i].hi - problem.bounds[i].lo <= kFixedWidth) {
      red.fixed_val[i] = 0.5 * (problem.bounds[i].lo + problem.bounds[i].hi);
    } else {
      red.to_red[i] = red.n_red++;
      red.to_orig.push_back(i);
    }
  }

  Barrier B;
  B.bounds.reserve(red.n_red);
  B.c.assign(red.n_red, 0.0);
  for (int i = 0; i < n; ++i) {
    if (red.to_red[i] >= 0) {
      B.bounds.push_back(problem.bounds[i]);
      B.c[red.to_red[i]] = problem.linear[i];
    }
  }
  for (const auto& sq : problem.squares) {
    AffineExpr e = reduce_expr(sq.expr, red);
    if (e.terms.empty()) continue;
    B.squares.push_back({std::move(e), sq.weight});
  }
  for (const auto& a : problem.affine_leq) {
    AffineExpr e = reduce_expr(a.expr, red);
    if (e.terms.empty()) {
      if (e.constant > opts.feas_tol) {
        res.status = KernelStatus::kInfeasible;
        return res;
      }
      continue;
    }
    B.ineq.push_back(std::move(e));
  }
  for (const auto& fl : problem.log_floors) {
    Floor f;
    f.floor = fl.floor;
    for (const auto& arg : fl.args) {
      AffineExpr e = reduce_expr(arg, red);
      if (e.terms.empty()) {
        if (1.0 + e.constant <= 0.0) {
          res.status = KernelStatus::kInfeasible;
          return res;
        }
        f.floor -= std::log2(1.0 + e.constant);
      } else {
        f.logs.emplace_back(1.0, std::move(e));
      }
    }
    if (f.logs.empty()) {
      if (f.floor > opts.feas_tol) {
        res.status = KernelStatus::kInfeasible;
        return res;
      }
      continue;
    }
    B.floors.push_back(std::move(f));
  }
  for (const auto& fl : problem.perspective_floors) {
    Floor f;
    f.floor = fl.floor;
    for (const auto& [sv, yv] : fl.pairs) {
      bool s_fixed = red.to_red[sv] < 0;
      bool y_fixed = red.to_red[yv] < 0;
      if (s_fixed && y_fixed) {
        f.floor -= perspective_value(red.fixed_val[sv], red.fixed_val[yv]);
      } else if (s_fixed) {
        double sc = red.fixed_val[sv];
        if (sc <= kSClamp) continue;  // closure: the term is identically 0
        // s log2(1 + y/s) with pinned s is a scaled plain log.
        f.logs.emplace_back(sc, AffineExpr::var(red.to_red[yv], 1.0 / sc));
      } else if (y_fixed) {
        throw std::invalid_argument("kernel: perspective pair with pinned y and free s");
      } else {
        f.pairs.emplace_back(red.to_red[sv], red.to_red[yv]);
      }
    }
    if (f.logs.empty() && f.pairs.empty()) {
      if (f.floor > opts.feas_tol) {
        res.status = KernelStatus::kInfeasible;
        return res;
      }
      continue;
    }
    B.floors.push_back(std::move(f));
  }

  // Epigraph auxiliaries for the max atoms.
  std::vector<std::pair<AffineExpr, AffineExpr>> epi_exprs;
  for (const auto& mx : problem.maxima) {
    AffineExpr a = reduce_expr(mx.a, red);
    AffineExpr b = reduce_expr(mx.b, red);
    int t = static_cast<int>(B.bounds.size());
    B.bounds.push_back({-kInf, kInf});
    B.c.push_back(mx.weight);
    AffineExpr ca = a, cb = b;  // a - t <= 0, b - t <= 0
    ca.terms.emplace_back(t, -1.0);
    cb.terms.emplace_back(t, -1.0);
    B.ineq.push_back(std::move(ca));
    B.ineq.push_back(std::move(cb));
    epi_exprs.emplace_back(std::move(a), std::move(b));
  }
  const int n_red = red.n_red;
  const int n_tot = static_cast<int>(B.bounds.size());

  // Assemble a fully pinned problem directly.
  auto finish = [&](const Eigen::VectorXd& xr, double mu_final, double dec2, int steps,
                    bool stalled) {
    res.point.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      res.point[i] = red.to_red[i] >= 0 ? xr[red.to_red[i]] : red.fixed_val[i];
    res.objective_value = problem.objective_value(res.point);
    double dec = std::isfinite(dec2) ? std::sqrt(std::max(0.0, dec2)) : 1.0;
    res.kkt_residual = B.barrier_count() * mu_final + dec;
    res.newton_steps = steps;
    double viol = problem.max_violation(res.point);
    bool centered = std::isfinite(dec2) && dec2 <= 1e-2 && !(stalled && dec2 > 1e-4);
    res.status = centered && viol <= opts.feas_tol * (1.0 + 1e-3) ? KernelStatus::kOptimal
                                                                  : KernelStatus::kNumericFailure;
  };

  if (n_red == 0) {
    // Nothing to optimize; the pinned point either satisfies everything or not.
    res.point.assign(n, 0.0);
    for (int i = 0; i < n; ++i) res.point[i] = red.fixed_val[i];
    res.objective_value = problem.objective_value(res.point);
    res.kkt_residual = 0.0;
    res.status = problem.max_violation(res.point) <= opts.feas_tol ? KernelStatus::kOptimal
                                                                   : KernelStatus::kInfeasible;
    return res;
  }

  // Starting point: a warm start that is strictly interior, otherwise phase 1.
  Eigen::VectorXd x0(n_tot);
  bool have_start = false;
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(n_tot);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (red.to_red[i] < 0) continue;
      double v = (*warm_start)[i];
      const auto& b = problem.bounds[i];
      double width = std::min(b.hi - b.lo, 1.0);
      if (v < b.lo + 1e-9 * width || v > b.hi - 1e-9 * width) ok = false;
      cand[red.to_red[i]] = v;
    }
    if (ok) {
      std::vector<double> full(*warm_start);
      for (int i = 0; i < n; ++i)
        if (red.to_red[i] < 0) full[i] = red.fixed_val[i];
      for (const auto& e : problem.affine_leq)
        if (e.expr.eval(full) > -1e-10) ok = false;
      if (ok) {
        for (const auto& fl : B.floors) {
          bool dom = true;
          double s = floor_slack(B, fl, cand, &dom);
          if (!dom || s < 1e-7 * (1.0 + std::fabs(fl.floor))) ok = false;
        }
      }
    }
    if (ok) {
      x0 = cand;
      have_start = true;
    }
  }

  if (!have_start && B.floors.empty() && B.ineq.size() == 2 * epi_exprs.size()) {
    // Box-only problem: the box midpoint is already strictly interior.
    for (int i = 0; i < n_red; ++i) {
      const auto& b = B.bounds[i];
      if (std::isfinite(b.lo) && std::isfinite(b.hi))
        x0[i] = 0.5 * (b.lo + b.hi);
      else if (std::isfinite(b.lo))
        x0[i] = b.lo + 1.0;
      else if (std::isfinite(b.hi))
        x0[i] = b.hi - 1.0;
      else
        x0[i] = 0.0;
    }
    have_start = true;
  }

  if (!have_start) {
    // Phase 1: minimize the common slack tau over the box.
    Barrier P;
    P.bounds.assign(B.bounds.begin(), B.bounds.begin() + n_red);
    P.squares.clear();
    Eigen::VectorXd xp(n_red + 1);
    for (int i = 0; i < n_red; ++i) {
      const auto& b = P.bounds[i];
      if (std::isfinite(b.lo) && std::isfinite(b.hi))
        xp[i] = 0.5 * (b.lo + b.hi);
      else if (std::isfinite(b.lo))
        xp[i] = b.lo + 1.0;
      else if (std::isfinite(b.hi))
        xp[i] = b.hi - 1.0;
      else
        xp[i] = 0.0;
    }
    const int tau = n_red;
    P.c.assign(n_red + 1, 0.0);
    P.c[tau] = 1.0;
    for (const auto& e : B.ineq) {
      if (!e.terms.empty() && e.terms.back().first >= n_red) continue;  // epigraph rows stay out
      AffineExpr r = e;
      r.terms.emplace_back(tau, -1.0);
      P.ineq.push_back(std::move(r));
    }
    for (const auto& fl : B.floors) {
      Floor f = fl;
      f.lin.terms.emplace_back(tau, 1.0);
      P.floors.push_back(std::move(f));
    }
    // Initial tau: worst violation plus margin.
    Eigen::VectorXd probe(n_red + 1);
    probe.head(n_red) = xp;
    probe[tau] = 0.0;
    double v0 = 1e-3;
    for (const auto& e : P.ineq) {
      double val = e.constant;
      for (const auto& [v, coeff] : e.terms)
        if (v < n_red) val += coeff * probe[v];
      v0 = std::max(v0, val + 1e-3);
    }
    for (const auto& fl : P.floors) {
      bool dom = true;
      Floor base = fl;
      base.lin.terms.pop_back();
      double s = floor_slack(P, base, probe, &dom);
      if (!dom)
        v0 = std::max(v0, 1e6);  // domain trouble: start far out
      else
        v0 = std::max(v0, -s + 1e-3);
    }
    xp.conservativeResize(n_red + 1);
    xp[tau] = v0;
    P.bounds.push_back({-1.0, v0 + 1.0});

    KernelOptions p1 = opts;
    double gap1 = std::max(opts.feas_tol / 4.0, 1e-9);
    const int m1 = P.barrier_count();
    auto check = [&](const Eigen::VectorXd& xc, double mu) -> int {
      double t = xc[tau];
      if (t <= -kInteriorTau) return 1;                          // strictly feasible
      if (t - m1 * mu > opts.feas_tol / 2.0) return 2;           // certified infeasible
      return 0;
    };
    BarrierOutcome o1 = run_barrier(P, xp, p1, gap1, check);
    if (o1.signal == 2) {
      res.status = KernelStatus::kInfeasible;
      return res;
    }
    double tau_star = o1.x[tau];
    if (o1.signal != 1) {
      if (tau_star > opts.feas_tol / 2.0) {
        res.status = KernelStatus::kInfeasible;
        return res;
      }
      B.relax = opts.feas_tol;  // only boundary-feasible: allow feas_tol slack
    }
    x0.head(n_red) = o1.x.head(n_red);
    have_start = true;
  }

  // Seat the epigraph auxiliaries strictly above their expressions.
  for (size_t k = 0; k < epi_exprs.size(); ++k) {
    const auto& [a, b] = epi_exprs[k];
    double va = a.constant, vb = b.constant;
    for (const auto& [v, coeff] : a.terms) va += coeff * x0[v];
    for (const auto& [v, coeff] : b.terms) vb += coeff * x0[v];
    double m = std::max(va, vb);
    x0[n_red + static_cast<int>(k)] = m + std::max(1e-3, 1e-3 * std::fabs(m));
  }

  BarrierOutcome o2 = run_barrier(B, x0, opts, opts.tol, nullptr);
  finish(o2.x, o2.mu_final, o2.decrement2, o2.steps, o2.stalled);
  return res;
}

}  // namespace noma
