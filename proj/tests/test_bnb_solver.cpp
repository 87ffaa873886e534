#include <doctest.h>

#include <cmath>
#include <limits>

#include "noma/baselines.hpp"
#include "noma/bnb_solver.hpp"
#include "noma/random.hpp"
#include "noma/sic_power.hpp"
#include "support/scenario_util.hpp"

using namespace noma;

TEST_CASE("mccormick envelope: corners, midpoint gap, underestimation") {
  SUBCASE("tight at every box corner") {
    for (int sign : {+1, -1}) {
      for (double v : {0.3, 1.7}) {
        for (double w : {-0.5, 2.5}) {
          CHECK(mccormick_lower(sign, v, w, 0.3, 1.7, -0.5, 2.5) ==
                doctest::Approx(sign * v * w).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("unit box midpoint gap is exactly one fourth") {
    double env = mccormick_lower(+1, 0.5, 0.5, 0.0, 1.0, 0.0, 1.0);
    CHECK(env == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(0.5 * 0.5 - env == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("degenerate box is exact everywhere") {
    RandomStream rng(3);
    for (int t = 0; t < 200; ++t) {
      double v = 1.3;
      double w = rng.uniform(-2.0, 5.0);
      for (int sign : {+1, -1})
        CHECK(mccormick_lower(sign, v, w, v, v, -2.0, 5.0) ==
              doctest::Approx(sign * v * w).epsilon(1e-12));
    }
  }
  SUBCASE("never exceeds the product") {
    RandomStream rng(4);
    for (int t = 0; t < 20000; ++t) {
      double vl = rng.uniform(-3.0, 3.0), vu = vl + rng.uniform(0.0, 4.0);
      double wl = rng.uniform(-3.0, 3.0), wu = wl + rng.uniform(0.0, 4.0);
      double v = rng.uniform(vl, vu), w = rng.uniform(wl, wu);
      for (int sign : {+1, -1}) {
        CHECK(mccormick_lower(sign, v, w, vl, vu, wl, wu) <= sign * v * w + 1e-10);
      }
    }
  }
}

TEST_CASE("branching bisects the longest normalized edge") {
  Scenario sc = testutil::shell(1, 1, {10.0}, {1.0});  // gamma cap = 1
  Box root = initial_box(sc);
  REQUIRE(root.dims() == 2);
  CHECK(root.upper[root.dim_gamma(0, 0)] == doctest::Approx(1.0));
  CHECK(root.upper[root.dim_sbar(0, 0)] == 1.0);

  SUBCASE("tie breaks toward the lowest index") {
    auto [a, b] = branch(root);
    CHECK(a.upper[0] == doctest::Approx(0.5));
    CHECK(b.lower[0] == doctest::Approx(0.5));
    CHECK(a.upper[1] == 1.0);
  }

  SUBCASE("normalization uses the root widths") {
    Box box = root;
    // widths: dim0 = 0.2 of initial 1.0; dim1 = 0.5 of initial 1.0 -> dim1.
    box.upper[0] = 0.2;
    box.lower[1] = 0.2;
    box.upper[1] = 0.7;
    auto [a, b] = branch(box);
    CHECK(a.upper[1] == doctest::Approx(0.45));
    CHECK(b.lower[1] == doctest::Approx(0.45));
  }

  SUBCASE("repeated branching drives the max normalized width to zero") {
    Box box = root;
    for (int k = 0; k < 40; ++k) box = branch(box).first;
    double w = 0.0;
    for (int d = 0; d < box.dims(); ++d)
      w = std::max(w, (box.upper[d] - box.lower[d]) / box.init_width[d]);
    CHECK(w <= std::pow(0.5, 20));
  }
}

TEST_CASE("penalty objective closed forms") {
  Scenario sc = testutil::shell(1, 1, {1.0}, {1.0});
  RelaxedPoint pt;
  pt.n_subcarriers = 1;
  pt.n_users = 1;
  pt.gamma = {1.0};
  pt.sbar = {0.5};
  CHECK(penalty_objective(pt, 10.0, sc) == doctest::Approx(6.0).epsilon(1e-12));
  pt.sbar = {1.0};
  CHECK(penalty_objective(pt, 10.0, sc) == doctest::Approx(1.0).epsilon(1e-12));
  pt.gamma = {0.0};
  pt.sbar = {0.3};
  CHECK(penalty_objective(pt, 10.0, sc) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lower bound problem: point box and sampling oracle") {
  Scenario sc = testutil::shell(1, 2, {5.0, 2.0}, {1.0, 1.5});
  const double theta = 4.0;

  SUBCASE("point box evaluates the penalized objective") {
    Box b = initial_box(sc);
    // Pin everything at a feasible point: full rate on the single subcarrier.
    for (int m = 0; m < 2; ++m) {
      double g = sinr_target(sc.rate_total[m]);
      b.lower[b.dim_gamma(0, m)] = b.upper[b.dim_gamma(0, m)] = g;
      b.lower[b.dim_sbar(0, m)] = b.upper[b.dim_sbar(0, m)] = 1.0;
    }
    ConvexProblem p = lower_bound_problem(b, theta, sc);
    KernelResult r = kernel_solve(p);
    REQUIRE(r.status == KernelStatus::kOptimal);
    RelaxedPoint pt;
    pt.n_subcarriers = 1;
    pt.n_users = 2;
    pt.gamma = {sinr_target(1.0), sinr_target(1.5)};
    pt.sbar = {1.0, 1.0};
    CHECK(r.objective_value == doctest::Approx(penalty_objective(pt, theta, sc)).epsilon(1e-9));
  }

  SUBCASE("bound never exceeds sampled feasible values") {
    // Two subcarriers so the rate floors carve out a full-dimensional set.
    Scenario sc2 = testutil::shell(2, 2, {5.0, 2.0, 3.0, 8.0}, {1.0, 1.5});
    Box b = initial_box(sc2);
    ConvexProblem p = lower_bound_problem(b, theta, sc2);
    KernelResult r = kernel_solve(p);
    REQUIRE(r.status == KernelStatus::kOptimal);
    RandomStream rng(17);
    int feasible_seen = 0;
    for (int t = 0; t < 20000; ++t) {
      RelaxedPoint pt;
      pt.n_subcarriers = 2;
      pt.n_users = 2;
      pt.gamma.resize(4);
      pt.sbar.resize(4);
      for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 2; ++m) {
          pt.gamma[pt.idx(i, m)] = rng.uniform(0.0, b.upper[b.dim_gamma(i, m)]);
          pt.sbar[pt.idx(i, m)] = rng.uniform(0.0, 1.0);
        }
      bool ok = true;
      for (int m = 0; m < 2 && ok; ++m) {
        double sum = 0.0;
        for (int i = 0; i < 2; ++i) sum += std::log2(1.0 + pt.gamma[pt.idx(i, m)]);
        ok = sum >= sc2.rate_total[m];
      }
      for (int i = 0; i < 2 && ok; ++i)
        ok = pt.sbar[pt.idx(i, 0)] + pt.sbar[pt.idx(i, 1)] <= 2.0;
      if (!ok) continue;
      ++feasible_seen;
      CHECK(r.objective_value <= penalty_objective(pt, theta, sc2) + 1e-7);
    }
    CHECK(feasible_seen > 100);
  }
}

TEST_CASE("binary recovery") {
  Scenario sc = testutil::shell(1, 2, {5.0, 2.0}, {1.0, 1.5});
  RelaxedPoint pt;
  pt.n_subcarriers = 1;
  pt.n_users = 2;
  pt.gamma = {0.5, 0.0};
  pt.sbar = {1.0, 0.2};
  Allocation a = recover_binary(pt, sc);
  CHECK(a.s(0, 0) == 1);
  CHECK(a.s(0, 1) == 0);
  CHECK(a.r(0, 0) == doctest::Approx(std::log2(1.5)));
  CHECK(a.p(0, 0) == doctest::Approx(0.1).epsilon(1e-12));

  pt.gamma = {0.0, 0.0};
  Allocation z = recover_binary(pt, sc);
  CHECK(z.s(0, 0) == 0);
  CHECK(z.s(0, 1) == 0);
  CHECK(system_power(z, sc) == 0.0);
}

TEST_CASE("bnb solves the single-link instance in closed form") {
  double beta = 37.0, rate = 3.0;
  Scenario sc = testutil::shell(1, 1, {beta}, {rate});
  BnbResult r = solve_bnb(sc, {.eps = 1e-6});
  REQUIRE(r.report.status == SolveStatus::kOptimal);
  CHECK(r.report.value_w == doctest::Approx(sinr_target(rate) / beta).epsilon(1e-5));
  CHECK(r.allocation.s(0, 0) == 1);
  CHECK(r.allocation.r(0, 0) == doctest::Approx(rate).epsilon(1e-6));
}

TEST_CASE("bnb matches the closed-form pair optimum on one subcarrier") {
  // Both users must share the lone subcarrier; the optimum is the closed
  // two-user formula at the demanded rates.
  double b1 = 80.0, b2 = 11.0, r1 = 1.0, r2 = 2.0;
  Scenario sc = testutil::shell(1, 2, {b1, b2}, {r1, r2});
  auto [p1, p2] = pair_powers({b1, b2, sinr_target(r1), sinr_target(r2)});
  double expected = p1 + p2;

  BnbResult r = solve_bnb(sc, {.eps = 1e-5});
  REQUIRE(r.report.status == SolveStatus::kOptimal);
  CHECK(r.report.value_w == doctest::Approx(expected).epsilon(1e-4));
  check_allocation(r.allocation, sc);

  // Bound traces: lower nondecreasing, upper nonincreasing, ordered.
  for (size_t k = 1; k < r.report.lbd_trace.size(); ++k) {
    CHECK(r.report.lbd_trace[k] >= r.report.lbd_trace[k - 1] - 1e-12);
    CHECK(r.report.ubd_trace[k] <= r.report.ubd_trace[k - 1] + 1e-12);
    CHECK(r.report.lbd_trace[k] <= r.report.ubd_trace[k] + 1e-9);
  }
}

TEST_CASE("bnb agrees with the brute-force oracle on a 2x3 instance") {
  RandomStream rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> beta(6);
    for (double& b : beta) b = rng.log_uniform(5.0, 500.0);
    std::vector<double> rates{rng.uniform(1.0, 2.5), rng.uniform(1.0, 2.5),
                              rng.uniform(1.0, 2.5)};
    Scenario sc = testutil::shell(2, 3, beta, rates);

    OracleResult oracle = brute_force_oracle(sc, 0.25);
    BnbResult r = solve_bnb(sc, {.eps = 1e-4});
    REQUIRE(r.report.status == SolveStatus::kOptimal);
    check_allocation(r.allocation, sc);
    CHECK(r.report.value_w <= oracle.value_w + 1e-4);
    CHECK(r.report.value_w >= oracle.value_w - oracle_grid_slack(sc, 0.25));
  }
}
