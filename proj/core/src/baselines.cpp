#include "noma/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "noma/random.hpp"
#include "noma/sic_power.hpp"

namespace noma {

namespace {

constexpr std::uint64_t kTagPairing = 0x70616972ULL;

// Closed-form total power for a schedule with equal per-user rate splits.
double equal_rate_power(const Scenario& sc, const std::vector<std::uint8_t>& sched) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  std::vector<int> k(M, 0);
  for (int i = 0; i < nf; ++i)
    for (int m = 0; m < M; ++m)
      if (sched[static_cast<size_t>(i) * M + m]) ++k[m];
  for (int m = 0; m < M; ++m)
    if (k[m] == 0) return std::numeric_limits<double>::infinity();
  std::vector<double> gamma_m(M);
  for (int m = 0; m < M; ++m) gamma_m[m] = sinr_target(sc.rate_total[m] / k[m]);

  double total = 0.0;
  for (int i = 0; i < nf; ++i) {
    int a = -1, b = -1;
    for (int m = 0; m < M; ++m) {
      if (!sched[static_cast<size_t>(i) * M + m]) continue;
      (a < 0 ? a : b) = m;
    }
    if (a < 0) continue;
    if (b < 0) {
      total += gamma_m[a] / sc.link(i, a).beta;
    } else {
      PairSpec spec{sc.link(i, a).beta, sc.link(i, b).beta, gamma_m[a], gamma_m[b]};
      auto [pa, pb] = pair_powers(spec);
      total += pa + pb;
    }
  }
  return total;
}

Allocation equal_rate_allocation(const Scenario& sc, const std::vector<std::uint8_t>& sched) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  std::vector<int> k(M, 0);
  for (int i = 0; i < nf; ++i)
    for (int m = 0; m < M; ++m)
      if (sched[static_cast<size_t>(i) * M + m]) ++k[m];
  Allocation alloc(nf, M);
  for (int i = 0; i < nf; ++i) {
    std::vector<int> on;
    for (int m = 0; m < M; ++m)
      if (sched[static_cast<size_t>(i) * M + m]) on.push_back(m);
    for (int m : on) {
      alloc.s(i, m) = 1;
      alloc.r(i, m) = sc.rate_total[m] / k[m];
    }
    if (on.size() == 1) {
      int m = on[0];
      alloc.p(i, m) = single_user_power(sc.link(i, m).beta, sinr_target(alloc.r(i, m)));
    } else if (on.size() == 2) {
      int m = on[0], n = on[1];
      PairSpec spec{sc.link(i, m).beta, sc.link(i, n).beta, sinr_target(alloc.r(i, m)),
                    sinr_target(alloc.r(i, n))};
      auto [pm, pn] = pair_powers(spec);
      alloc.p(i, m) = pm;
      alloc.p(i, n) = pn;
      auto [um, un] = optimal_sic_order(spec.beta_m, spec.beta_n);
      alloc.u(i, m) = static_cast<std::uint8_t>(um);
      alloc.u(i, n) = static_cast<std::uint8_t>(un);
    }
  }
  return alloc;
}

// Depth-first enumeration over per-subcarrier occupancy (empty, solo, pair).
void enumerate_schedules(const Scenario& sc, int c7_limit, int i,
                         std::vector<std::uint8_t>& sched, std::vector<int>& coverage,
                         const std::function<void(const std::vector<std::uint8_t>&)>& visit) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  if (i == nf) {
    for (int m = 0; m < M; ++m)
      if (coverage[m] == 0) return;
    visit(sched);
    return;
  }
  int left = nf - i - 1;  // subcarriers after this one
  auto feasible_tail = [&]() {
    int uncovered = 0;
    for (int m = 0; m < M; ++m)
      if (coverage[m] == 0) ++uncovered;
    return uncovered <= left * c7_limit;
  };
  auto set_user = [&](int m, int delta) {
    sched[static_cast<size_t>(i) * M + m] = delta > 0 ? 1 : 0;
    coverage[m] += delta;
  };
  // empty
  if (feasible_tail()) enumerate_schedules(sc, c7_limit, i + 1, sched, coverage, visit);
  // solo
  for (int m = 0; m < M; ++m) {
    set_user(m, +1);
    if (feasible_tail()) enumerate_schedules(sc, c7_limit, i + 1, sched, coverage, visit);
    set_user(m, -1);
  }
  if (c7_limit >= 2) {
    for (int m = 0; m + 1 < M; ++m) {
      for (int n = m + 1; n < M; ++n) {
        set_user(m, +1);
        set_user(n, +1);
        if (feasible_tail()) enumerate_schedules(sc, c7_limit, i + 1, sched, coverage, visit);
        set_user(n, -1);
        set_user(m, -1);
      }
    }
  }
}

}  // namespace

double min_cost_assignment(const std::vector<std::vector<double>>& cost, std::vector<int>* pick) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("min_cost_assignment: square matrix required");
  // Jonker-Volgenant style shortest augmenting paths with potentials.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, n), way(n + 1, 0);
  for (int r = 0; r < n; ++r) {
    p[n] = r;
    int j0 = n;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != n);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != n);
  }
  double total = 0.0;
  if (pick) pick->assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (p[j] < n) {
      total += cost[p[j]][j];
      if (pick) (*pick)[p[j]] = j;
    }
  }
  return total;
}

OmaResult solve_oma(const Scenario& sc, const OmaOptions& opts) {
  OmaResult out;
  const int M = sc.n_users();
  out.oma_scenario =
      sc.n_subcarriers() == M ? sc : regenerate_grid(sc, M, opts.scale_noise_with_bw);
  // The spacing rescale keeps the total spectrum; per-Hz demands grow by
  // M / N_F so every user still receives the same bits per second.
  double demand_scale = static_cast<double>(M) / sc.n_subcarriers();
  for (double& r : out.oma_scenario.rate_total) r *= demand_scale;
  DcOptions dc = opts.dc;
  dc.c7_limit = 1;
  DcResult r = solve_dc(out.oma_scenario, dc);
  out.allocation = std::move(r.allocation);
  out.report = std::move(r.report);
  out.report.method = "oma";

  // With M subcarriers and M users each taking exactly one subcarrier, the
  // problem is an assignment with closed-form costs.
  std::vector<std::vector<double>> cost(M, std::vector<double>(M));
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < M; ++i)
      cost[m][i] = sinr_target(out.oma_scenario.rate_total[m]) / out.oma_scenario.link(i, m).beta;
  out.assignment_value_w = min_cost_assignment(cost);
  return out;
}

DcResult solve_random_pairing(const Scenario& sc, std::uint64_t seed, const DcOptions& opts) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  if (M > nf * opts.c7_limit)
    throw std::invalid_argument("solve_random_pairing: not enough scheduling slots");
  RandomStream rng = RandomStream::substream(seed, {kTagPairing});

  std::vector<int> slots;
  for (int i = 0; i < nf; ++i)
    for (int c = 0; c < opts.c7_limit; ++c) slots.push_back(i);
  // Fisher-Yates on slots and users.
  for (int k = static_cast<int>(slots.size()) - 1; k > 0; --k)
    std::swap(slots[k], slots[rng.uniform_index(k + 1)]);
  std::vector<int> users(M);
  for (int m = 0; m < M; ++m) users[m] = m;
  for (int k = M - 1; k > 0; --k) std::swap(users[k], users[rng.uniform_index(k + 1)]);

  std::vector<std::uint8_t> sched(static_cast<size_t>(nf) * M, 0);
  for (int k = 0; k < M; ++k) sched[static_cast<size_t>(slots[k]) * M + users[k]] = 1;

  DcResult out;
  out.report.method = "random";
  FixedScheduleResult fixed = solve_rates_fixed_schedule(sc, sched, opts);
  out.report.status = fixed.status;
  out.report.iterations = fixed.iterations;
  if (fixed.status == SolveStatus::kOptimal) {
    out.allocation = std::move(fixed.allocation);
    out.report.value_w = system_power(out.allocation, sc);
  }
  return out;
}

DcResult solve_equal_rate(const Scenario& sc, const EqualRateOptions& opts) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  const int c7 = opts.dc.c7_limit;
  DcResult out;
  out.report.method = "equal_rate";

  std::vector<std::uint8_t> best_sched;
  double best = std::numeric_limits<double>::infinity();

  if (nf * M <= opts.exact_cutoff) {
    std::vector<std::uint8_t> sched(static_cast<size_t>(nf) * M, 0);
    std::vector<int> coverage(M, 0);
    enumerate_schedules(sc, c7, 0, sched, coverage, [&](const std::vector<std::uint8_t>& s) {
      double p = equal_rate_power(sc, s);
      if (p < best) {
        best = p;
        best_sched = s;
      }
    });
    out.report.heuristic = false;
  } else {
    if (M > nf * c7) {
      out.report.status = SolveStatus::kInfeasible;
      return out;
    }
    // Greedy seeding: users in decreasing demand pick their best free slot.
    std::vector<std::uint8_t> sched(static_cast<size_t>(nf) * M, 0);
    std::vector<int> load(nf, 0);
    std::vector<int> order(M);
    for (int m = 0; m < M; ++m) order[m] = m;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sc.rate_total[a] > sc.rate_total[b]; });
    for (int m : order) {
      int pick = -1;
      double best_beta = -1.0;
      for (int i = 0; i < nf; ++i) {
        if (load[i] >= c7) continue;
        if (sc.link(i, m).beta > best_beta) {
          best_beta = sc.link(i, m).beta;
          pick = i;
        }
      }
      sched[static_cast<size_t>(pick) * M + m] = 1;
      ++load[pick];
    }
    best = equal_rate_power(sc, sched);
    // Local descent over single-assignment moves: add, drop, move.
    bool improved = true;
    int rounds = 0;
    while (improved && rounds < 200) {
      improved = false;
      ++rounds;
      for (int m = 0; m < M; ++m) {
        for (int i = 0; i < nf; ++i) {
          size_t id = static_cast<size_t>(i) * M + m;
          if (!sched[id] && load[i] < c7) {
            sched[id] = 1;
            ++load[i];
            double p = equal_rate_power(sc, sched);
            if (p < best - 1e-12) {
              best = p;
              improved = true;
            } else {
              sched[id] = 0;
              --load[i];
            }
          } else if (sched[id]) {
            sched[id] = 0;
            --load[i];
            double p = equal_rate_power(sc, sched);
            if (p < best - 1e-12) {
              best = p;
              improved = true;
            } else {
              bool moved = false;
              for (int j = 0; j < nf && !moved; ++j) {
                if (j == i || load[j] >= c7) continue;
                size_t jd = static_cast<size_t>(j) * M + m;
                if (sched[jd]) continue;
                sched[jd] = 1;
                ++load[j];
                double q = equal_rate_power(sc, sched);
                if (q < best - 1e-12) {
                  best = q;
                  improved = true;
                  moved = true;
                } else {
                  sched[jd] = 0;
                  --load[j];
                }
              }
              if (!moved) {
                sched[id] = 1;
                ++load[i];
              }
            }
          }
        }
      }
    }
    best_sched = sched;
    out.report.heuristic = true;
  }

  if (!std::isfinite(best) || best_sched.empty()) {
    out.report.status = SolveStatus::kInfeasible;
    return out;
  }
  out.allocation = equal_rate_allocation(sc, best_sched);
  out.report.status = SolveStatus::kOptimal;
  out.report.value_w = best;
  out.report.iterations = 1;
  return out;
}

OracleResult brute_force_oracle(const Scenario& sc, double grid_step) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  if (nf > 3 || M > 4 || grid_step < 0.25)
    throw std::invalid_argument("brute_force_oracle: instance too large for enumeration");

  std::vector<int> units(M);
  for (int m = 0; m < M; ++m)
    units[m] = static_cast<int>(std::ceil(sc.rate_total[m] / grid_step - 1e-9));

  OracleResult out;
  out.value_w = std::numeric_limits<double>::infinity();

  std::vector<std::uint8_t> sched(static_cast<size_t>(nf) * M, 0);
  std::vector<int> coverage(M, 0);
  std::vector<double> best_rate;

  auto visit = [&](const std::vector<std::uint8_t>& s) {
    // Subcarriers of each user under this schedule.
    std::vector<std::vector<int>> mine(M);
    for (int i = 0; i < nf; ++i)
      for (int m = 0; m < M; ++m)
        if (s[static_cast<size_t>(i) * M + m]) mine[m].push_back(i);

    std::vector<double> rate(static_cast<size_t>(nf) * M, 0.0);
    // Recursive split of each user's units across its subcarriers.
    std::function<void(int)> split_user = [&](int m) {
      if (m == M) {
        double total = 0.0;
        for (int i = 0; i < nf; ++i) {
          int a = -1, b = -1;
          for (int u = 0; u < M; ++u) {
            if (!s[static_cast<size_t>(i) * M + u]) continue;
            (a < 0 ? a : b) = u;
          }
          if (a < 0) continue;
          double ga = sinr_target(rate[static_cast<size_t>(i) * M + a]);
          if (b < 0) {
            total += ga / sc.link(i, a).beta;
          } else {
            double gb = sinr_target(rate[static_cast<size_t>(i) * M + b]);
            total += ga / sc.link(i, a).beta + gb / sc.link(i, b).beta +
                     ga * gb / std::max(sc.link(i, a).beta, sc.link(i, b).beta);
          }
          if (total >= out.value_w) return;  // monotone: prune
        }
        if (total < out.value_w) {
          out.value_w = total;
          best_rate = rate;
          out.allocation = Allocation(nf, M);
          for (int i = 0; i < nf; ++i)
            for (int u = 0; u < M; ++u)
              out.allocation.s(i, u) = s[static_cast<size_t>(i) * M + u];
        }
        return;
      }
      const auto& slots = mine[m];
      int k = static_cast<int>(slots.size());
      std::function<void(int, int)> comp = [&](int slot, int remaining) {
        if (slot == k - 1) {
          rate[static_cast<size_t>(slots[slot]) * M + m] = remaining * grid_step;
          split_user(m + 1);
          rate[static_cast<size_t>(slots[slot]) * M + m] = 0.0;
          return;
        }
        for (int take = 0; take <= remaining; ++take) {
          rate[static_cast<size_t>(slots[slot]) * M + m] = take * grid_step;
          comp(slot + 1, remaining - take);
        }
        rate[static_cast<size_t>(slots[slot]) * M + m] = 0.0;
      };
      comp(0, units[m]);
    };
    split_user(0);
  };
  enumerate_schedules(sc, 2, 0, sched, coverage, visit);

  if (!std::isfinite(out.value_w)) throw std::runtime_error("brute_force_oracle: no feasible schedule");

  // Materialize rates, powers, and SIC order of the best point.
  Allocation& a = out.allocation;
  for (int i = 0; i < nf; ++i) {
    std::vector<int> on;
    for (int m = 0; m < M; ++m)
      if (a.s(i, m)) on.push_back(m);
    for (int m : on) a.r(i, m) = best_rate[static_cast<size_t>(i) * M + m];
    if (on.size() == 1) {
      int m = on[0];
      a.p(i, m) = single_user_power(sc.link(i, m).beta, sinr_target(a.r(i, m)));
    } else if (on.size() == 2) {
      int m = on[0], n = on[1];
      PairSpec spec{sc.link(i, m).beta, sc.link(i, n).beta, sinr_target(a.r(i, m)),
                    sinr_target(a.r(i, n))};
      auto [pm, pn] = pair_powers(spec);
      a.p(i, m) = pm;
      a.p(i, n) = pn;
      auto [um, un] = optimal_sic_order(spec.beta_m, spec.beta_n);
      a.u(i, m) = static_cast<std::uint8_t>(um);
      a.u(i, n) = static_cast<std::uint8_t>(un);
    }
  }
  return out;
}

double oracle_grid_slack(const Scenario& sc, double grid_step) {
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  double slack = 0.0;
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < M; ++m) {
      double dgamma = std::numbers::ln2 * std::exp2(sc.rate_total[m]);
      double dp = 1.0 / sc.link(i, m).beta;
      for (int n = 0; n < M; ++n) {
        if (n == m) continue;
        dp += sinr_target(sc.rate_total[n]) /
              std::max(sc.link(i, m).beta, sc.link(i, n).beta);
      }
      slack += grid_step * dgamma * dp;
    }
  }
  return slack;
}

}  // namespace noma
