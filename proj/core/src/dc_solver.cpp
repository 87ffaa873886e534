#include "noma/dc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "noma/sic_power.hpp"

namespace noma {

namespace {

double pair_coeff(const Scenario& sc, int i, int m, int n) {
  return 1.0 / std::max(sc.link(i, m).beta, sc.link(i, n).beta);
}

// Power part of the objective: sum gt/beta + sum_{m<n} gt gt / max(beta).
double power_objective(const std::vector<double>& gt, const Scenario& sc) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  double f = 0.0;
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) f += gt[static_cast<size_t>(i) * M + m] / sc.link(i, m).beta;
    for (int m = 0; m + 1 < M; ++m)
      for (int n = m + 1; n < M; ++n)
        f += gt[static_cast<size_t>(i) * M + m] * gt[static_cast<size_t>(i) * M + n] *
             pair_coeff(sc, i, m, n);
  }
  return f;
}

struct Layout {
  int nf, M, nm;
  int s(int i, int m) const { return i * M + m; }
  int g(int i, int m) const { return nm + i * M + m; }
  int gt(int i, int m) const { return 2 * nm + i * M + m; }
};

// Shared constraint set of the big-M formulation (boxes, C7, C9-C12, C6).
ConvexProblem bigm_problem(const Scenario& sc, int c7_limit) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  Layout L{nf, M, nf * M};
  ConvexProblem p;
  p.bounds.resize(static_cast<size_t>(3) * L.nm);
  p.linear.assign(static_cast<size_t>(3) * L.nm, 0.0);
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double cap = sinr_target(sc.rate_total[m]);
      p.bounds[L.s(i, m)] = {0.0, 1.0};
      p.bounds[L.g(i, m)] = {0.0, cap};
      p.bounds[L.gt(i, m)] = {0.0, cap};
      // C10: gt <= g; C11: gt <= s*cap; C12: g - (1-s)cap <= gt.
      p.affine_leq.push_back({AffineExpr{{{L.gt(i, m), 1.0}, {L.g(i, m), -1.0}}}});
      p.affine_leq.push_back({AffineExpr{{{L.gt(i, m), 1.0}, {L.s(i, m), -cap}}}});
      p.affine_leq.push_back(
          {AffineExpr{{{L.g(i, m), 1.0}, {L.s(i, m), cap}, {L.gt(i, m), -1.0}}, -cap}});
    }
    AffineLeqAtom c7;
    for (int m = 0; m < M; ++m) c7.expr.terms.emplace_back(L.s(i, m), 1.0);
    c7.expr.constant = -static_cast<double>(c7_limit);
    p.affine_leq.push_back(std::move(c7));
  }
  for (int m = 0; m < M; ++m) {
    PerspectiveLogFloorAtom c6;
    c6.floor = sc.rate_total[m];
    for (int i = 0; i < nf; ++i) c6.pairs.emplace_back(L.s(i, m), L.gt(i, m));
    p.perspective_floors.push_back(std::move(c6));
  }
  // Squares of G1: 0.5 * (gt_m + gt_n)^2 / max(beta).
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m + 1 < M; ++m) {
      for (int n = m + 1; n < M; ++n) {
        SquareAtom sq;
        sq.weight = 0.5 * pair_coeff(sc, i, m, n);
        sq.expr = AffineExpr{{{L.gt(i, m), 1.0}, {L.gt(i, n), 1.0}}};
        p.squares.push_back(std::move(sq));
      }
    }
  }
  return p;
}

DcIterate iterate_from_point(const std::vector<double>& x, const Scenario& sc, double eta) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  Layout L{nf, M, nf * M};
  DcIterate it;
  it.n_subcarriers = nf;
  it.n_users = M;
  it.s.assign(x.begin(), x.begin() + L.nm);
  it.gamma.assign(x.begin() + L.nm, x.begin() + 2 * L.nm);
  it.gamma_tilde.assign(x.begin() + 2 * L.nm, x.begin() + 3 * L.nm);
  auto [g1, g2] = dc_split(it, eta, sc);
  it.objective = g1 - g2;
  return it;
}

std::vector<double> point_from_iterate(const DcIterate& it) {
  std::vector<double> x;
  x.reserve(it.s.size() * 3);
  x.insert(x.end(), it.s.begin(), it.s.end());
  x.insert(x.end(), it.gamma.begin(), it.gamma.end());
  x.insert(x.end(), it.gamma_tilde.begin(), it.gamma_tilde.end());
  return x;
}

}  // namespace

std::pair<double, double> dc_split(const DcIterate& pt, double eta, const Scenario& sc) {
  if (eta < 0.0) throw std::invalid_argument("dc_split: eta must be nonnegative");
  const int nf = pt.n_subcarriers, M = pt.n_users;
  double g1 = 0.0, g2 = 0.0;
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double gt = pt.gamma_tilde[pt.idx(i, m)];
      double s = pt.s[pt.idx(i, m)];
      g1 += gt / sc.link(i, m).beta + eta * s;
      g2 += eta * s * s;
    }
    for (int m = 0; m + 1 < M; ++m) {
      for (int n = m + 1; n < M; ++n) {
        double a = pt.gamma_tilde[pt.idx(i, m)], b = pt.gamma_tilde[pt.idx(i, n)];
        double c = pair_coeff(sc, i, m, n);
        g1 += 0.5 * (a + b) * (a + b) * c;
        g2 += 0.5 * (a * a + b * b) * c;
      }
    }
  }
  return {g1, g2};
}

ConvexProblem linearized_subproblem(const DcIterate& anchor, double eta, const Scenario& sc,
                                    int c7_limit) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  Layout L{nf, M, nf * M};
  ConvexProblem p = bigm_problem(sc, c7_limit);
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double coeff_sum = 0.0;
      for (int n = 0; n < M; ++n)
        if (n != m) coeff_sum += pair_coeff(sc, i, std::min(m, n), std::max(m, n));
      // d G2 / d gt at the anchor uses the anchor's gamma_tilde.
      p.linear[L.gt(i, m)] =
          1.0 / sc.link(i, m).beta - anchor.gamma_tilde[anchor.idx(i, m)] * coeff_sum;
      p.linear[L.s(i, m)] = eta - 2.0 * eta * anchor.s[anchor.idx(i, m)];
    }
  }
  auto [g1a, g2a] = dc_split(anchor, eta, sc);
  (void)g1a;
  // Constant completing the affine expansion of -G2 (gradient 'dot' anchor).
  double c0 = -g2a;
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double coeff_sum = 0.0;
      for (int n = 0; n < M; ++n)
        if (n != m) coeff_sum += pair_coeff(sc, i, std::min(m, n), std::max(m, n));
      double gta = anchor.gamma_tilde[anchor.idx(i, m)];
      double sa = anchor.s[anchor.idx(i, m)];
      c0 += gta * gta * coeff_sum + 2.0 * eta * sa * sa;
    }
  }
  p.objective_constant = c0;
  return p;
}

double initial_power_scale(const Scenario& sc, int c7_limit) {
  ConvexProblem p = bigm_problem(sc, c7_limit);
  Layout L{sc.n_subcarriers(), sc.n_users(), sc.n_subcarriers() * sc.n_users()};
  for (int i = 0; i < L.nf; ++i)
    for (int m = 0; m < L.M; ++m) p.linear[L.gt(i, m)] = 1.0 / sc.link(i, m).beta;
  KernelOptions kopts;
  kopts.tol = 1e-6;
  kopts.feas_tol = 1e-6;
  KernelResult r = kernel_solve(p, kopts);
  if (r.status == KernelStatus::kInfeasible)
    throw std::runtime_error("initial_power_scale: infeasible constraint set");
  std::vector<double> gt(r.point.begin() + 2 * L.nm, r.point.end());
  double f = power_objective(gt, sc);
  return f > 1e-12 ? f : 1e-12;
}

DcResult solve_dc(const Scenario& sc, const DcOptions& opts) {
  sc.validate();
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  Layout L{nf, M, nf * M};
  DcResult out;
  out.report.method = "dc";

  double eta = opts.eta;
  if (!(eta > 0.0)) eta = 10.0 * initial_power_scale(sc, opts.c7_limit);
  out.report.eta = eta;

  KernelOptions kopts;
  kopts.tol = opts.kernel_tol;
  kopts.feas_tol = opts.kernel_feas_tol;

  // Initial feasible point: minimize G1 over the big-M set.
  ConvexProblem init = bigm_problem(sc, opts.c7_limit);
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      init.linear[L.gt(i, m)] = 1.0 / sc.link(i, m).beta;
      init.linear[L.s(i, m)] = eta;
    }
  }
  KernelResult r0 = kernel_solve(init, kopts);
  if (r0.status == KernelStatus::kInfeasible) {
    out.report.status = SolveStatus::kInfeasible;
    return out;
  }
  if (r0.status != KernelStatus::kOptimal) {
    out.report.status = SolveStatus::kNumericFailure;
    return out;
  }

  DcIterate cur = iterate_from_point(r0.point, sc, eta);
  cur.k = 0;
  out.report.objective_trace.push_back(cur.objective);

  int k = 0;
  bool converged = false;
  while (k < opts.k_max) {
    ++k;
    ConvexProblem sub = linearized_subproblem(cur, eta, sc, opts.c7_limit);
    std::vector<double> warm = point_from_iterate(cur);
    KernelResult r = kernel_solve(sub, kopts, &warm);
    if (r.status != KernelStatus::kOptimal) {
      r = kernel_solve(sub, kopts);
      if (r.status != KernelStatus::kOptimal) {
        out.report.status = SolveStatus::kNumericFailure;
        return out;
      }
    }
    DcIterate next = iterate_from_point(r.point, sc, eta);
    next.k = k;
    out.report.objective_trace.push_back(next.objective);

    double change = 0.0;
    for (size_t j = 0; j < next.s.size(); ++j) {
      double ds = next.s[j] - cur.s[j];
      double dg = next.gamma_tilde[j] - cur.gamma_tilde[j];
      change += ds * ds + dg * dg;
    }
    change = std::sqrt(change);
    cur = std::move(next);
    if (change <= opts.eps) {
      converged = true;
      break;
    }
  }

  // Round the relaxed schedule at the threshold and enforce the cap.
  std::vector<std::uint8_t> sched(static_cast<size_t>(nf) * M, 0);
  for (int i = 0; i < nf; ++i) {
    std::vector<int> on;
    for (int m = 0; m < M; ++m)
      if (cur.s[cur.idx(i, m)] >= opts.round_threshold) on.push_back(m);
    if (static_cast<int>(on.size()) > opts.c7_limit) {
      std::sort(on.begin(), on.end(), [&](int a, int b) {
        double sa = cur.s[cur.idx(i, a)], sb = cur.s[cur.idx(i, b)];
        if (sa != sb) return sa > sb;
        return a < b;
      });
      on.resize(opts.c7_limit);
    }
    for (int m : on) sched[static_cast<size_t>(i) * M + m] = 1;
  }
  // Repair pass: every user needs at least one subcarrier.
  for (int m = 0; m < M; ++m) {
    bool covered = false;
    for (int i = 0; i < nf; ++i) covered = covered || sched[static_cast<size_t>(i) * M + m];
    if (covered) continue;
    int best = -1;
    double best_beta = -1.0;
    for (int i = 0; i < nf; ++i) {
      int load = 0;
      for (int u = 0; u < M; ++u) load += sched[static_cast<size_t>(i) * M + u];
      if (load >= opts.c7_limit) continue;
      if (sc.link(i, m).beta > best_beta) {
        best_beta = sc.link(i, m).beta;
        best = i;
      }
    }
    if (best < 0) {
      out.report.status = SolveStatus::kInfeasibleRounding;
      out.report.iterations = k;
      return out;
    }
    sched[static_cast<size_t>(best) * M + m] = 1;
  }

  DcOptions ropts = opts;
  FixedScheduleResult fixed = solve_rates_fixed_schedule(sc, sched, ropts);
  if (fixed.status != SolveStatus::kOptimal) {
    out.report.status = SolveStatus::kInfeasibleRounding;
    out.report.iterations = k;
    return out;
  }

  out.allocation = std::move(fixed.allocation);
  out.final_iterate = std::move(cur);
  out.report.status = converged ? SolveStatus::kOptimal : SolveStatus::kBudget;
  out.report.iterations = k;
  out.report.value_w = system_power(out.allocation, sc);
  return out;
}

FixedScheduleResult solve_rates_fixed_schedule(const Scenario& sc,
                                               const std::vector<std::uint8_t>& sched,
                                               const DcOptions& opts) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  FixedScheduleResult out;
  if (static_cast<int>(sched.size()) != nf * M)
    throw std::invalid_argument("solve_rates_fixed_schedule: schedule size mismatch");

  // Entries that may carry rate, and each user's entry list.
  std::vector<std::pair<int, int>> entries;  // (i, m)
  std::vector<std::vector<int>> user_entries(M);
  std::vector<int> partner(static_cast<size_t>(nf) * M, -1);
  for (int i = 0; i < nf; ++i) {
    std::vector<int> on;
    for (int m = 0; m < M; ++m)
      if (sched[static_cast<size_t>(i) * M + m]) on.push_back(m);
    if (static_cast<int>(on.size()) > opts.c7_limit)
      throw std::invalid_argument("solve_rates_fixed_schedule: schedule violates the cap");
    for (size_t a = 0; a < on.size(); ++a) {
      user_entries[on[a]].push_back(static_cast<int>(entries.size()));
      entries.emplace_back(i, on[a]);
      if (on.size() == 2) partner[static_cast<size_t>(i) * M + on[a]] = on[1 - a];
    }
  }
  for (int m = 0; m < M; ++m) {
    if (user_entries[m].empty() && sc.rate_total[m] > 0.0) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
  }

  const int ne = static_cast<int>(entries.size());
  ConvexProblem base;
  base.bounds.resize(ne);
  base.linear.assign(ne, 0.0);
  for (int e = 0; e < ne; ++e) {
    auto [i, m] = entries[e];
    // A sliver above the SINR cap keeps one-subcarrier users strictly interior.
    double cap = sinr_target(sc.rate_total[m]);
    base.bounds[e] = {0.0, cap * (1.0 + 1e-9) + 1e-12};
  }
  for (int m = 0; m < M; ++m) {
    if (user_entries[m].empty()) continue;
    SumLogFloorAtom fl;
    fl.floor = sc.rate_total[m];
    for (int e : user_entries[m]) fl.args.push_back(AffineExpr::var(e));
    base.log_floors.push_back(std::move(fl));
  }
  for (int i = 0; i < nf; ++i) {
    std::vector<int> es;
    for (int e = 0; e < ne; ++e)
      if (entries[e].first == i) es.push_back(e);
    if (es.size() == 2) {
      SquareAtom sq;
      auto [i0, m0] = entries[es[0]];
      auto [i1, m1] = entries[es[1]];
      sq.weight = 0.5 * pair_coeff(sc, i, std::min(m0, m1), std::max(m0, m1));
      sq.expr = AffineExpr{{{es[0], 1.0}, {es[1], 1.0}}};
      base.squares.push_back(std::move(sq));
    }
  }

  KernelOptions kopts;
  kopts.tol = opts.kernel_tol;
  kopts.feas_tol = opts.kernel_feas_tol;

  std::vector<double> gt(ne, 0.0);
  bool have_point = false;
  int iters = 0;
  for (int k = 0; k < 60; ++k) {
    ConvexProblem p = base;
    for (int e = 0; e < ne; ++e) {
      auto [i, m] = entries[e];
      double d2 = 0.0;
      int q = partner[static_cast<size_t>(i) * M + m];
      if (q >= 0 && have_point) {
        double c = pair_coeff(sc, i, std::min(m, q), std::max(m, q));
        d2 = gt[e] * c;
      }
      p.linear[e] = 1.0 / sc.link(i, m).beta - d2;
    }
    KernelResult r = have_point ? kernel_solve(p, kopts, &gt) : kernel_solve(p, kopts);
    if (r.status == KernelStatus::kInfeasible) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    if (r.status != KernelStatus::kOptimal) {
      out.status = SolveStatus::kNumericFailure;
      return out;
    }
    ++iters;
    double change = 0.0;
    for (int e = 0; e < ne; ++e) {
      double dd = r.point[e] - gt[e];
      change += dd * dd;
    }
    gt = r.point;
    have_point = true;
    if (std::sqrt(change) <= std::min(opts.eps, 1e-4) && k > 0) break;
  }

  Allocation a(nf, M);
  constexpr double kDropGamma = 1e-9;
  // Power is priced from gamma_tilde itself, not from the stored rate, so a
  // realized rate log2(1 + beta p / beta) reproduces r bit for bit.
  std::vector<double> gamma_grid(static_cast<size_t>(nf) * M, 0.0);
  for (int e = 0; e < ne; ++e) {
    auto [i, m] = entries[e];
    if (gt[e] <= kDropGamma) continue;
    a.s(i, m) = 1;
    a.r(i, m) = std::log2(1.0 + gt[e]);
    gamma_grid[static_cast<size_t>(i) * M + m] = gt[e];
  }
  for (int i = 0; i < nf; ++i) {
    auto users = a.users_on(i);
    if (users.size() == 1) {
      int m = users[0];
      a.p(i, m) = single_user_power(sc.link(i, m).beta, gamma_grid[static_cast<size_t>(i) * M + m]);
    } else if (users.size() == 2) {
      int m = users[0], n = users[1];
      PairSpec spec{sc.link(i, m).beta, sc.link(i, n).beta,
                    gamma_grid[static_cast<size_t>(i) * M + m],
                    gamma_grid[static_cast<size_t>(i) * M + n]};
      auto [pm, pn] = pair_powers(spec);
      a.p(i, m) = pm;
      a.p(i, n) = pn;
      auto [um, un] = optimal_sic_order(spec.beta_m, spec.beta_n);
      a.u(i, m) = static_cast<std::uint8_t>(um);
      a.u(i, n) = static_cast<std::uint8_t>(un);
    }
  }
  out.allocation = std::move(a);
  out.status = SolveStatus::kOptimal;
  out.iterations = iters;
  return out;
}

}  // namespace noma
