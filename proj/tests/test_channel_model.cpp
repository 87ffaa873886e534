#include <doctest.h>

#include <cmath>
#include <complex>

#include "noma/channel.hpp"
#include "noma/ncx2.hpp"
#include "noma/random.hpp"
#include "support/oracles.hpp"

using namespace noma;

namespace {
SystemConfig small_config() {
  SystemConfig cfg;
  cfg.n_subcarriers = 3;
  cfg.n_users = 4;
  cfg.seed = 42;
  return cfg;
}
}  // namespace

TEST_CASE("path loss follows the log-distance law") {
  SystemConfig cfg;
  cfg.min_distance_m = 1.0;
  CHECK(10.0 * std::log10(path_loss(1.0, cfg)) == doctest::Approx(38.0).epsilon(1e-12));
  CHECK(10.0 * std::log10(path_loss(100.0, cfg)) == doctest::Approx(110.0).epsilon(1e-12));
  // 38 + 36 log10(500), evaluated in 64-bit arithmetic.
  CHECK(10.0 * std::log10(path_loss(500.0, cfg)) == doctest::Approx(135.16292015609667).epsilon(1e-12));
  CHECK_THROWS_AS(path_loss(0.5, cfg), std::invalid_argument);
}

TEST_CASE("ncx2 cdf matches the central closed form at lambda = 0") {
  for (double x : {0.01, 0.1, 1.0, 2.5, 7.0, 30.0}) {
    CHECK(ncx2_cdf(x, 0.0) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
  }
  CHECK(ncx2_cdf(0.0, 5.0) == 0.0);
  CHECK(ncx2_cdf(0.0, 0.0) == 0.0);
}

TEST_CASE("ncx2 cdf agrees with an adaptive-quadrature oracle") {
  // Reference spot value: scipy.stats.ncx2.cdf(4, 2, 4) = 0.3964990393880066.
  CHECK(ncx2_cdf(4.0, 4.0) == doctest::Approx(0.3964990393880066).epsilon(1e-10));
  for (double lambda : {0.3, 1.0, 4.0, 12.0, 25.0, 60.0}) {
    for (double x : {0.05, 0.8, 3.0, 9.0, 20.0, 45.0}) {
      double ref = oracles::ncx2_cdf_by_quadrature(x, lambda);
      CHECK(std::fabs(ncx2_cdf(x, lambda) - ref) <= 1e-8);
    }
  }
  // Deep left tail, where the thresholds live.
  CHECK(ncx2_cdf(1.2, 25.0) == doctest::Approx(2.010190825598692e-05).epsilon(1e-8));
}

TEST_CASE("ncx2 quantile closed form and round trip") {
  CHECK(ncx2_quantile(0.0, 3.0) == 0.0);
  CHECK(ncx2_quantile(0.1, 0.0) == doctest::Approx(0.21072103131565256).epsilon(1e-10));
  // scipy.stats.ncx2.ppf(1e-5, 2, 50) = 8.490016860432519.
  CHECK(ncx2_quantile(1e-5, 50.0) == doctest::Approx(8.490016860432519).epsilon(1e-8));
  CHECK_THROWS_AS(ncx2_quantile(1.0, 1.0), std::invalid_argument);

  for (double lambda : {0.0, 0.5, 2.0, 10.0, 40.0, 100.0}) {
    for (double p : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.6, 0.9}) {
      double x = ncx2_quantile(p, lambda);
      CHECK(std::fabs(ncx2_cdf(x, lambda) - p) <= 1e-8);
    }
  }
}

TEST_CASE("cnr outage threshold closed forms") {
  // Perfect CSIT collapses to the estimated CNR.
  std::complex<double> h(3e-6, -4e-6);
  CHECK(cnr_outage_threshold(h, 0.0, 1e-12, 0.37) ==
        doctest::Approx(std::norm(h) / 1e-12).epsilon(1e-12));
  // Central case: |h|^2 exponential with unit mean.
  CHECK(cnr_outage_threshold({0.0, 0.0}, 1.0, 1.0, 0.1) ==
        doctest::Approx(0.10536051565782628).epsilon(1e-9));
  // delta -> 0+ sends the threshold to 0 (clamped to exactly 0 deep down).
  CHECK(cnr_outage_threshold({1.0, 0.0}, 1.0, 1.0, 1e-300) <= 1e-250);
  CHECK(cnr_outage_threshold({1.0, 0.0}, 1.0, 1.0, 1e-320) == 0.0);
}

TEST_CASE("threshold is monotone in delta and in the estimate gain") {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    double ev = rng.uniform(0.05, 2.0);
    double mag = rng.uniform(0.0, 3.0);
    std::complex<double> h(mag, 0.0);
    double d1 = rng.log_uniform(1e-5, 0.5);
    double d2 = rng.log_uniform(1e-5, 0.5);
    if (d1 > d2) std::swap(d1, d2);
    double b1 = cnr_outage_threshold(h, ev, 1.0, d1);
    double b2 = cnr_outage_threshold(h, ev, 1.0, d2);
    CHECK(b1 <= b2 * (1.0 + 1e-9) + 1e-15);

    double m2 = mag + rng.uniform(0.1, 1.0);
    double bg = cnr_outage_threshold({m2, 0.0}, ev, 1.0, d1);
    CHECK(b1 <= bg * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("scenario sampling: variance split and determinism") {
  SystemConfig cfg = small_config();

  SUBCASE("perfect CSIT mode") {
    cfg.err_var = 0.0;
    Scenario s = sample_links(cfg);
    for (const auto& row : s.links)
      for (const Link& l : row) CHECK(l.err_var_abs == 0.0);
  }

  SUBCASE("error variance is kappa^2 / PL") {
    Scenario s = sample_links(cfg);
    for (int m = 0; m < cfg.n_users; ++m) {
      double pl = path_loss(s.distances_m[m], cfg);
      for (int i = 0; i < cfg.n_subcarriers; ++i)
        CHECK(s.link(i, m).err_var_abs == doctest::Approx(0.1 / pl).epsilon(1e-12));
    }
  }

  SUBCASE("same seed reproduces the scenario bit for bit") {
    Scenario a = sample_links(cfg);
    Scenario b = sample_links(cfg);
    REQUIRE(a.links.size() == b.links.size());
    for (int i = 0; i < cfg.n_subcarriers; ++i) {
      for (int m = 0; m < cfg.n_users; ++m) {
        CHECK(a.link(i, m).h_hat == b.link(i, m).h_hat);
        CHECK(a.link(i, m).beta == b.link(i, m).beta);
        CHECK(a.link(i, m).delta == b.link(i, m).delta);
      }
    }
    CHECK(a.rate_total == b.rate_total);
    CHECK(a.distances_m == b.distances_m);
  }

  SUBCASE("empirical estimate variance matches the split") {
    // Many draws of a one-user grid with a pinned distance distribution.
    SystemConfig c2;
    c2.n_subcarriers = 64;
    c2.n_users = 1;
    c2.min_distance_m = 100.0;
    c2.cell_radius_m = 100.0;  // pins the path loss
    c2.seed = 9;
    double pl = path_loss(100.0, c2);
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 40; ++rep) {
      c2.seed = 1000 + rep;
      Scenario s = sample_links(c2);
      for (int i = 0; i < c2.n_subcarriers; ++i) {
        acc += std::norm(s.link(i, 0).h_hat);
        ++count;
      }
    }
    double mean_gain = acc / count;
    CHECK(mean_gain == doctest::Approx((1.0 - 0.1) / pl).epsilon(0.08));
  }
}

TEST_CASE("true channel draws are unbiased and hit the outage target") {
  Link l;
  l.h_hat = {1.3, -0.4};
  l.err_var_abs = 0.7;
  l.noise_w = 1.0;
  l.delta = 0.02;
  l.beta = cnr_outage_threshold(l.h_hat, l.err_var_abs, l.noise_w, l.delta);

  SUBCASE("zero error variance returns the estimate") {
    Link perfect = l;
    perfect.err_var_abs = 0.0;
    RandomStream rng(3);
    CHECK(sample_true_channel(perfect, rng) == perfect.h_hat);
  }

  SUBCASE("mean of the draws is the estimate") {
    RandomStream rng(5);
    std::complex<double> acc{0.0, 0.0};
    const int n = 100000;
    for (int k = 0; k < n; ++k) acc += sample_true_channel(l, rng);
    acc /= static_cast<double>(n);
    double band = 4.0 * std::sqrt(l.err_var_abs / 2.0 / n);
    CHECK(std::fabs(acc.real() - l.h_hat.real()) <= band);
    CHECK(std::fabs(acc.imag() - l.h_hat.imag()) <= band);
  }

  SUBCASE("empirical CNR outage frequency equals delta") {
    RandomStream rng(11);
    const int trials = 1000000;
    int outages = 0;
    for (int k = 0; k < trials; ++k) {
      std::complex<double> h = sample_true_channel(l, rng);
      if (std::norm(h) / l.noise_w < l.beta) ++outages;
    }
    double freq = static_cast<double>(outages) / trials;
    double sigma = std::sqrt(l.delta * (1.0 - l.delta) / trials);
    CHECK(std::fabs(freq - l.delta) <= 3.0 * sigma);
  }
}

TEST_CASE("config validation") {
  SystemConfig cfg = small_config();
  cfg.err_var = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.outage_range = {0.0, 0.1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.n_subcarriers = 5;
  cfg.n_users = 4;  // underloaded: allowed, only the overload predicate flips
  CHECK_NOTHROW(cfg.validate());
  CHECK_FALSE(cfg.overload_condition_holds());
}
