#include "noma/bnb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "noma/dc_solver.hpp"
#include "noma/parallel.hpp"
#include "noma/sic_power.hpp"

namespace noma {

namespace {

double pair_coeff(const Scenario& sc, int i, int m, int n) {
  return 1.0 / std::max(sc.link(i, m).beta, sc.link(i, n).beta);
}

struct Node {
  Box box;
  double lb = 0.0;
  double ub = 0.0;
  RelaxedPoint point;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const { return a.lb > b.lb; }
};

RelaxedPoint point_from_kernel(const std::vector<double>& x, const Scenario& sc) {
  const int nf = sc.n_subcarriers(), m = sc.n_users();
  RelaxedPoint pt;
  pt.n_subcarriers = nf;
  pt.n_users = m;
  pt.gamma.assign(x.begin(), x.begin() + static_cast<long>(nf) * m);
  pt.sbar.assign(x.begin() + static_cast<long>(nf) * m, x.end());
  return pt;
}

std::vector<double> kernel_warm_start(const RelaxedPoint& parent, const Box& child) {
  const int nf = child.n_subcarriers, m = child.n_users;
  std::vector<double> x(static_cast<size_t>(2) * nf * m);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < m; ++j) {
      double g = parent.gamma[parent.idx(i, j)];
      double lo = child.lower[child.dim_gamma(i, j)], hi = child.upper[child.dim_gamma(i, j)];
      double w = hi - lo;
      if (g < lo + 0.01 * w) g = lo + 0.01 * w;
      if (g > hi - 0.01 * w) g = hi - 0.01 * w;
      x[static_cast<size_t>(i) * m + j] = g;
      double s = parent.sbar[parent.idx(i, j)];
      lo = child.lower[child.dim_sbar(i, j)];
      hi = child.upper[child.dim_sbar(i, j)];
      w = hi - lo;
      if (s < lo + 0.01 * w) s = lo + 0.01 * w;
      if (s > hi - 0.01 * w) s = hi - 0.01 * w;
      x[static_cast<size_t>(nf) * m + static_cast<size_t>(i) * m + j] = s;
    }
  }
  return x;
}

}  // namespace

double penalty_objective(const RelaxedPoint& pt, double theta, const Scenario& sc) {
  if (!(theta > 0.0)) throw std::invalid_argument("penalty_objective: theta must be positive");
  const int nf = pt.n_subcarriers, M = pt.n_users;
  double f = 0.0;
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double g = pt.gamma[pt.idx(i, m)];
      f += g / sc.link(i, m).beta;
      f += theta * (g - pt.sbar[pt.idx(i, m)] * g);
    }
    for (int m = 0; m + 1 < M; ++m)
      for (int n = m + 1; n < M; ++n)
        f += pt.gamma[pt.idx(i, m)] * pt.gamma[pt.idx(i, n)] * pair_coeff(sc, i, m, n);
  }
  return f;
}

double mccormick_lower(int sign, double v, double w, double vl, double vu, double wl, double wu) {
  if (sign > 0) {
    return std::max(vl * w + wl * v - vl * wl, vu * w + wu * v - vu * wu);
  }
  return -std::min(vl * w + wu * v - vl * wu, vu * w + wl * v - vu * wl);
}

Box initial_box(const Scenario& sc) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  Box b;
  b.n_subcarriers = nf;
  b.n_users = M;
  b.lower.assign(static_cast<size_t>(nf) * 2 * M, 0.0);
  b.upper.resize(static_cast<size_t>(nf) * 2 * M);
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      b.upper[b.dim_gamma(i, m)] = sinr_target(sc.rate_total[m]);
      b.upper[b.dim_sbar(i, m)] = 1.0;
    }
  }
  b.init_width = b.upper;
  return b;
}

std::pair<Box, Box> branch(const Box& box) {
  int best = -1;
  double best_norm = -1.0;
  for (int k = 0; k < box.dims(); ++k) {
    double w0 = box.init_width[k];
    if (!(w0 > 0.0)) continue;
    double norm = (box.upper[k] - box.lower[k]) / w0;
    if (norm > best_norm + 1e-15) {
      best_norm = norm;
      best = k;
    }
  }
  if (best < 0) throw std::invalid_argument("branch: degenerate box");
  Box a = box, b = box;
  double mid = 0.5 * (box.lower[best] + box.upper[best]);
  a.upper[best] = mid;
  b.lower[best] = mid;
  return {std::move(a), std::move(b)};
}

ConvexProblem lower_bound_problem(const Box& box, double theta, const Scenario& sc,
                                  int c7_limit) {
  if (!(theta > 0.0)) throw std::invalid_argument("lower_bound_problem: theta must be positive");
  const int nf = box.n_subcarriers, M = box.n_users;
  const int nm = nf * M;
  ConvexProblem p;
  p.bounds.resize(static_cast<size_t>(2) * nm);
  p.linear.assign(static_cast<size_t>(2) * nm, 0.0);
  auto vgamma = [&](int i, int m) { return i * M + m; };
  auto vsbar = [&](int i, int m) { return nm + i * M + m; };
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      p.bounds[vgamma(i, m)] = {box.lower[box.dim_gamma(i, m)], box.upper[box.dim_gamma(i, m)]};
      p.bounds[vsbar(i, m)] = {box.lower[box.dim_sbar(i, m)], box.upper[box.dim_sbar(i, m)]};
      p.linear[vgamma(i, m)] = 1.0 / sc.link(i, m).beta + theta;
    }
  }

  for (int i = 0; i < nf; ++i) {
    // Bilinear SINR products, convex-envelope epigraphs.
    for (int m = 0; m + 1 < M; ++m) {
      for (int n = m + 1; n < M; ++n) {
        double vl = box.lower[box.dim_gamma(i, m)], vu = box.upper[box.dim_gamma(i, m)];
        double wl = box.lower[box.dim_gamma(i, n)], wu = box.upper[box.dim_gamma(i, n)];
        int gm = vgamma(i, m), gn = vgamma(i, n);
        MaxOfTwoAtom mx;
        mx.weight = pair_coeff(sc, i, m, n);
        mx.a = AffineExpr{{{gn, vl}, {gm, wl}}, -vl * wl};
        mx.b = AffineExpr{{{gn, vu}, {gm, wu}}, -vu * wu};
        if (mx.weight > 0.0) p.maxima.push_back(std::move(mx));
      }
    }
    // Penalty products -sbar*gamma: envelope of the negated bilinear term.
    for (int m = 0; m < M; ++m) {
      double vl = box.lower[box.dim_sbar(i, m)], vu = box.upper[box.dim_sbar(i, m)];
      double wl = box.lower[box.dim_gamma(i, m)], wu = box.upper[box.dim_gamma(i, m)];
      int s = vsbar(i, m), g = vgamma(i, m);
      MaxOfTwoAtom mx;
      mx.weight = theta;
      mx.a = AffineExpr{{{g, -vl}, {s, -wu}}, vl * wu};
      mx.b = AffineExpr{{{g, -vu}, {s, -wl}}, vu * wl};
      p.maxima.push_back(std::move(mx));
    }
    // Scheduling cap per subcarrier.
    AffineLeqAtom cap;
    for (int m = 0; m < M; ++m) cap.expr.terms.emplace_back(vsbar(i, m), 1.0);
    cap.expr.constant = -static_cast<double>(c7_limit);
    p.affine_leq.push_back(std::move(cap));
  }
  // Per-user rate floors.
  for (int m = 0; m < M; ++m) {
    SumLogFloorAtom fl;
    fl.floor = sc.rate_total[m];
    for (int i = 0; i < nf; ++i) fl.args.push_back(AffineExpr::var(vgamma(i, m)));
    p.log_floors.push_back(std::move(fl));
  }
  return p;
}

Allocation recover_binary(const RelaxedPoint& pt, const Scenario& sc, double threshold,
                          int c7_limit) {
  const int nf = pt.n_subcarriers, M = pt.n_users;
  Allocation a(nf, M);
  for (int i = 0; i < nf; ++i) {
    std::vector<int> users;
    for (int m = 0; m < M; ++m) {
      if (pt.gamma[pt.idx(i, m)] > threshold) {
        a.s(i, m) = 1;
        a.r(i, m) = std::log2(1.0 + pt.gamma[pt.idx(i, m)]);
        users.push_back(m);
      }
    }
    if (static_cast<int>(users.size()) > c7_limit)
      throw std::runtime_error("recover_binary: scheduling cap violated at subcarrier " +
                               std::to_string(i));
    if (users.size() == 1) {
      int m = users[0];
      a.p(i, m) = single_user_power(sc.link(i, m).beta, pt.gamma[pt.idx(i, m)]);
    } else if (users.size() == 2) {
      int m = users[0], n = users[1];
      PairSpec spec{sc.link(i, m).beta, sc.link(i, n).beta, pt.gamma[pt.idx(i, m)],
                    pt.gamma[pt.idx(i, n)]};
      auto [pm, pn] = pair_powers(spec);
      a.p(i, m) = pm;
      a.p(i, n) = pn;
      auto [um, un] = optimal_sic_order(spec.beta_m, spec.beta_n);
      a.u(i, m) = static_cast<std::uint8_t>(um);
      a.u(i, n) = static_cast<std::uint8_t>(un);
    }
  }
  return a;
}

BnbResult solve_bnb(const Scenario& sc, const BnbOptions& opts) {
  sc.validate();
  BnbResult out;
  out.report.method = "bnb";
  double theta = opts.theta;
  if (!(theta > 0.0)) theta = 10.0 * initial_power_scale(sc, opts.c7_limit);
  out.report.theta = theta;

  KernelOptions kopts;
  kopts.tol = opts.kernel_tol;
  kopts.feas_tol = opts.kernel_feas_tol;

  enum class BoundOutcome { kBounded, kInfeasible, kUnresolved };
  auto bound_node = [&](const Box& box, const std::vector<double>* warm,
                        Node& node) -> BoundOutcome {
    ConvexProblem p = lower_bound_problem(box, theta, sc, opts.c7_limit);
    KernelResult r = kernel_solve(p, kopts, warm);
    if (r.status == KernelStatus::kNumericFailure && warm) {
      // Retry cold; a poor warm start is the usual cause.
      r = kernel_solve(p, kopts, nullptr);
    }
    if (r.status == KernelStatus::kInfeasible) return BoundOutcome::kInfeasible;
    if (r.status != KernelStatus::kOptimal) return BoundOutcome::kUnresolved;
    node.box = box;
    node.point = point_from_kernel(r.point, sc);
    node.lb = r.objective_value - opts.kernel_tol;
    node.ub = penalty_objective(node.point, theta, sc);
    return BoundOutcome::kBounded;
  };

  Node root;
  {
    BoundOutcome o = bound_node(initial_box(sc), nullptr, root);
    if (o != BoundOutcome::kBounded) {
      out.report.status =
          o == BoundOutcome::kInfeasible ? SolveStatus::kInfeasible : SolveStatus::kNumericFailure;
      return out;
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  double lbd = root.lb;
  double ubd = root.ub;
  RelaxedPoint incumbent = root.point;
  open.push(std::move(root));

  long iterations = 0;
  SolveStatus status = SolveStatus::kOptimal;
  out.report.lbd_trace.push_back(lbd);
  out.report.ubd_trace.push_back(ubd);

  while (ubd - lbd > opts.eps) {
    // Drop nodes that can no longer contain an improvement.
    while (!open.empty() && open.top().lb >= ubd) open.pop();
    if (open.empty()) {
      lbd = ubd;
      out.report.lbd_trace.push_back(lbd);
      out.report.ubd_trace.push_back(ubd);
      break;
    }
    if (iterations >= opts.node_budget) {
      status = SolveStatus::kBudget;
      break;
    }
    ++iterations;

    Node cur = open.top();
    open.pop();
    lbd = std::max(lbd, cur.lb);

    auto [ba, bb] = branch(cur.box);
    Node child[2];
    BoundOutcome oc[2];
    std::vector<double> warm_a = kernel_warm_start(cur.point, ba);
    std::vector<double> warm_b = kernel_warm_start(cur.point, bb);
    auto solve_child = [&](int k) {
      const Box& b = k == 0 ? ba : bb;
      const std::vector<double>& w = k == 0 ? warm_a : warm_b;
      oc[k] = bound_node(b, &w, child[k]);
      if (oc[k] == BoundOutcome::kBounded) child[k].lb = std::max(child[k].lb, cur.lb);
      if (oc[k] == BoundOutcome::kUnresolved) {
        // Cannot bound, so cannot fathom: requeue the child on the parent's
        // bound and point; further splitting will resolve it.
        child[k].box = b;
        child[k].lb = cur.lb;
        child[k].ub = std::numeric_limits<double>::infinity();
        child[k].point = cur.point;
      }
    };
    if (opts.parallel_children && thread_budget() > 1) {
      parallel_for(2, solve_child);
    } else {
      solve_child(0);
      solve_child(1);
    }

    for (int k = 0; k < 2; ++k) {
      if (oc[k] == BoundOutcome::kInfeasible) continue;
      if (child[k].ub < ubd) {
        ubd = child[k].ub;
        incumbent = child[k].point;
      }
      if (child[k].lb < ubd) open.push(std::move(child[k]));
    }
    if (!open.empty()) lbd = std::max(lbd, open.top().lb);
    out.report.lbd_trace.push_back(lbd);
    out.report.ubd_trace.push_back(std::min(ubd, out.report.ubd_trace.back()));
  }

  out.incumbent = incumbent;
  out.allocation = recover_binary(incumbent, sc, opts.recover_threshold, opts.c7_limit);
  out.report.status = status;
  out.report.iterations = iterations;
  out.report.value_w = system_power(out.allocation, sc);
  return out;
}

}  // namespace noma
