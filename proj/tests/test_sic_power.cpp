#include <doctest.h>

#include <array>
#include <cmath>

#include "noma/channel.hpp"
#include "noma/ncx2.hpp"
#include "noma/random.hpp"
#include "noma/sic_power.hpp"

using namespace noma;

namespace {

// The published four-subcarrier solution used as golden vectors: thresholds,
// per-subcarrier rates, powers in dBm, and which user performs SIC.
struct GoldenRow {
  double beta_a, beta_b;
  double rate_a, rate_b;
  double dbm_a, dbm_b;
  bool sic_on_b;  // the higher-threshold side
};
constexpr std::array<GoldenRow, 4> kGolden{{
    {783.39, 39.99, 8.0, 2.03, 25.13, 30.35, false},
    {30.92, 520.27, 4.97, 3.0, 31.42, 11.29, true},
    {8.57, 269.80, 1.0, 7.0, 27.69, 26.73, true},
    {9.59, 1349.80, 3.0, 4.0, 29.07, 10.46, true},
}};

PairSpec random_spec(RandomStream& rng) {
  PairSpec s;
  s.beta_m = rng.log_uniform(0.5, 2000.0);
  s.beta_n = rng.log_uniform(0.5, 2000.0);
  s.gamma_m = rng.log_uniform(0.05, 1000.0);
  s.gamma_n = rng.log_uniform(0.05, 1000.0);
  return s;
}

}  // namespace

TEST_CASE("SIC order goes to the higher threshold, ties to the first user") {
  CHECK(optimal_sic_order(269.80, 8.57) == std::make_pair(1, 0));
  CHECK(optimal_sic_order(30.92, 520.27) == std::make_pair(0, 1));
  CHECK(optimal_sic_order(5.0, 5.0) == std::make_pair(1, 0));
  // At a tie both orders cost the same total power.
  PairSpec tie{5.0, 5.0, 2.0, 3.0};
  auto [a1, a2] = pair_powers(tie);
  PairSpec swapped{5.0, 5.0, 3.0, 2.0};
  auto [b1, b2] = pair_powers(swapped);
  CHECK(a1 + a2 == doctest::Approx(b1 + b2).epsilon(1e-12));
}

TEST_CASE("pair powers reproduce the golden vectors") {
  {
    auto [p1, p4] = pair_powers({8.57, 269.80, sinr_target(1.0), sinr_target(7.0)});
    CHECK(p1 == doctest::Approx(0.5874051655013913).epsilon(1e-12));
    CHECK(p4 == doctest::Approx(0.47071905114899926).epsilon(1e-12));
    CHECK(std::fabs(watts_to_dbm(p1) - 27.69) <= 0.01);
    CHECK(std::fabs(watts_to_dbm(p4) - 26.73) <= 0.01);
  }
  {
    auto [p3, p6] = pair_powers({9.59, 1349.80, sinr_target(3.0), sinr_target(4.0)});
    CHECK(p3 == doctest::Approx(0.8077163094181025).epsilon(1e-12));
    CHECK(p6 == doctest::Approx(0.011112757445547489).epsilon(1e-12));
    CHECK(std::fabs(watts_to_dbm(p3) - 29.07) <= 0.01);
    CHECK(std::fabs(watts_to_dbm(p6) - 10.46) <= 0.01);
  }
  {
    auto [pm, pn] = pair_powers({100.0, 10.0, 0.0, 5.0});
    CHECK(pm == 0.0);
    CHECK(pn == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("pair powers are symmetric under a user swap") {
  RandomStream rng(21);
  for (int t = 0; t < 2000; ++t) {
    PairSpec s = random_spec(rng);
    auto [pm, pn] = pair_powers(s);
    auto [qn, qm] = pair_powers({s.beta_n, s.beta_m, s.gamma_n, s.gamma_m});
    CHECK(pm == doctest::Approx(qm).epsilon(1e-12));
    CHECK(pn == doctest::Approx(qn).epsilon(1e-12));
  }
}

TEST_CASE("single user power") {
  CHECK(single_user_power(783.39, sinr_target(8.0)) == doctest::Approx(0.32550836747979933).epsilon(1e-12));
  CHECK(std::fabs(watts_to_dbm(single_user_power(783.39, sinr_target(8.0))) - 25.13) <= 0.01);
  CHECK(single_user_power(3.0, 0.0) == 0.0);
  CHECK(single_user_power(1.0, 1.0) == 1.0);
}

TEST_CASE("subcarrier power") {
  SUBCASE("two scheduled users, golden subcarrier 1") {
    std::array<std::uint8_t, 2> sched{1, 1};
    std::array<double, 2> gamma{sinr_target(8.0), 3.0841};
    std::array<double, 2> beta{783.39, 39.99};
    double total = subcarrier_power(sched, gamma, beta);
    // The published value rounds to 1.4066 W; full precision 1.40653...
    CHECK(total == doctest::Approx(1.4065305040693596).epsilon(1e-12));
    CHECK(total == doctest::Approx(1.4066).epsilon(3e-4));
    auto [pm, pn] = pair_powers({beta[0], beta[1], gamma[0], gamma[1]});
    CHECK(total == doctest::Approx(pm + pn).epsilon(1e-12));
  }
  SUBCASE("one user reduces to the single-user power") {
    std::array<std::uint8_t, 3> sched{0, 1, 0};
    std::array<double, 3> gamma{1.0, 7.0, 2.0};
    std::array<double, 3> beta{1.0, 3.5, 2.0};
    CHECK(subcarrier_power(sched, gamma, beta) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("empty row is zero, three users rejected") {
    std::array<std::uint8_t, 3> none{0, 0, 0};
    std::array<double, 3> g{1, 1, 1}, b{1, 1, 1};
    CHECK(subcarrier_power(none, g, b) == 0.0);
    std::array<std::uint8_t, 3> three{1, 1, 1};
    CHECK_THROWS_AS(subcarrier_power(three, g, b), std::invalid_argument);
  }
}

TEST_CASE("system power over the golden allocation") {
  // Scenario shell holding the four golden subcarriers over seven users.
  const int kUsers[4][2] = {{1, 4}, {4, 6}, {0, 3}, {2, 5}};
  Scenario sc;
  sc.config.n_subcarriers = 4;
  sc.config.n_users = 7;
  sc.links.assign(4, std::vector<Link>(7));
  for (auto& row : sc.links)
    for (auto& l : row) l.beta = 1.0;
  Allocation alloc(4, 7);
  for (int i = 0; i < 4; ++i) {
    const GoldenRow& g = kGolden[i];
    int ua = kUsers[i][0], ub = kUsers[i][1];
    sc.links[i][ua].beta = g.beta_a;
    sc.links[i][ub].beta = g.beta_b;
    alloc.s(i, ua) = 1;
    alloc.s(i, ub) = 1;
    alloc.r(i, ua) = g.rate_a;
    alloc.r(i, ub) = g.rate_b;
  }
  double total = system_power(alloc, sc);
  CHECK(total == doctest::Approx(4.686439707742742).epsilon(1e-12));
  // Summing the dBm->W conversions of the published power row: 4.6868 W.
  double published = 0.0;
  for (const GoldenRow& g : kGolden) published += dbm_to_watts(g.dbm_a) + dbm_to_watts(g.dbm_b);
  CHECK(published == doctest::Approx(4.686797073884045).epsilon(1e-12));
  CHECK(total == doctest::Approx(published).epsilon(2e-4));

  Allocation zero(4, 7);
  CHECK(system_power(zero, sc) == 0.0);
}

TEST_CASE("four-case powers and their prerequisites") {
  SUBCASE("case III infeasible when the SINR product reaches one") {
    PairSpec s{10.0, 5.0, 2.0, 0.5};  // gamma product = 1
    CHECK_FALSE(case_power(SicCase::III, s).has_value());
    CHECK_FALSE(case_power(SicCase::IV, s).has_value());
  }
  SUBCASE("equal thresholds make cases I and II tie") {
    PairSpec s{7.0, 7.0, 3.0, 11.0};
    auto p1 = case_power(SicCase::I, s);
    auto p2 = case_power(SicCase::II, s);
    REQUIRE(p1.has_value());
    REQUIRE(p2.has_value());
    CHECK(*p1 == doctest::Approx(*p2).epsilon(1e-12));
  }
  SUBCASE("case I equals the closed pair form") {
    PairSpec s{269.80, 8.57, 127.0, 1.0};
    auto p1 = case_power(SicCase::I, s);
    REQUIRE(p1.has_value());
    CHECK(*p1 == doctest::Approx(1.0581242166503906).epsilon(1e-12));
    auto [pm, pn] = pair_powers(s);
    CHECK(*p1 == doctest::Approx(pm + pn).epsilon(1e-12));
  }
}

TEST_CASE("case I dominates the other SIC policies") {
  RandomStream rng(77);
  int tested = 0;
  while (tested < 10000) {
    PairSpec s = random_spec(rng);
    if (s.beta_m < s.beta_n) std::swap(s.beta_m, s.beta_n);
    auto p1 = case_power(SicCase::I, s);
    auto p2 = case_power(SicCase::II, s);
    REQUIRE(p1.has_value());
    REQUIRE(p2.has_value());
    CHECK(*p1 <= *p2 * (1.0 + 1e-12));
    if (auto p3 = case_power(SicCase::III, s)) CHECK(*p1 < *p3);
    if (auto p4 = case_power(SicCase::IV, s)) CHECK(*p1 < *p4);
    ++tested;
  }
}

TEST_CASE("a NOMA pair costs more than the two solo transmissions") {
  RandomStream rng(78);
  for (int t = 0; t < 2000; ++t) {
    PairSpec s = random_spec(rng);
    auto [pm, pn] = pair_powers(s);
    double solo = s.gamma_m / s.beta_m + s.gamma_n / s.beta_n;
    CHECK(pm + pn > solo);
  }
}

TEST_CASE("grid oracle confirms the closed-form pair powers") {
  // Build links from raw channel parameters so the feasibility region is
  // evaluated through the ncx2 quantile path end to end, then brute-force
  // the (p_m, p_n) plane under the exact outage inequalities.
  RandomStream rng(79);
  for (int t = 0; t < 12; ++t) {
    double noise = 1e-6;
    std::complex<double> hm(rng.uniform(0.5e-3, 3e-3), rng.uniform(-1e-3, 1e-3));
    std::complex<double> hn(rng.uniform(0.2e-3, 2e-3), rng.uniform(-1e-3, 1e-3));
    double evm = rng.uniform(0.2e-6, 2e-6), evn = rng.uniform(0.2e-6, 2e-6);
    double dm = rng.log_uniform(1e-3, 0.1), dn = rng.log_uniform(1e-3, 0.1);
    double beta_m = cnr_outage_threshold(hm, evm, noise, dm);
    double beta_n = cnr_outage_threshold(hn, evn, noise, dn);
    double gm = rng.uniform(0.3, 6.0), gn = rng.uniform(0.3, 6.0);

    PairSpec spec{beta_m, beta_n, gm, gn};
    auto [pm_star, pn_star] = pair_powers(spec);
    double closed = pm_star + pn_star;

    // Outage-feasibility test of a candidate power pair under the optimal
    // SIC order (the higher-beta user decodes the partner first).
    auto feasible = [&](double pm, double pn) {
      double bh = std::max(beta_m, beta_n), bl = std::min(beta_m, beta_n);
      double ph = beta_m >= beta_n ? pm : pn;  // power of the high-beta user
      double pl = beta_m >= beta_n ? pn : pm;
      double gh = beta_m >= beta_n ? gm : gn;
      double gl = beta_m >= beta_n ? gn : gm;
      if (pl - ph * gl <= 0.0) return false;
      double need_h = std::max(gl / (pl - ph * gl), gh / ph);
      double need_l = gl / (pl - ph * gl);
      return need_h <= bh && need_l <= bl;
    };

    const int kGrid = 220;
    double hi_m = 2.2 * pm_star + 1e-9, hi_n = 2.2 * pn_star + 1e-9;
    double best = 1e300;
    for (int a = 1; a <= kGrid; ++a) {
      for (int b = 1; b <= kGrid; ++b) {
        double pm = hi_m * a / kGrid, pn = hi_n * b / kGrid;
        if (pm + pn < best && feasible(pm, pn)) best = pm + pn;
      }
    }
    double resolution = hi_m / kGrid + hi_n / kGrid;
    CHECK(best >= closed - 1e-12);        // the grid can never beat the optimum
    CHECK(best <= closed + resolution * 3.0);  // and lands within grid slack
  }
}
