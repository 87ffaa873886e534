#include "noma/outage_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "noma/parallel.hpp"
#include "noma/random.hpp"

namespace noma {

namespace {
constexpr std::uint64_t kTagOutage = 0x6f757467ULL;
constexpr int kChunks = 64;

// Decodability margin: a rate is in outage when the realized rate falls
// short by more than one part in 1e9. Keeps the exact-binding and
// perfect-CSIT cases immune to last-ulp rounding of the closed-form powers.
bool short_of(double realized, double target) {
  return realized < target - 1e-9 * (1.0 + std::fabs(target));
}
}  // namespace

std::vector<RateTriple> realized_rates(std::span<const std::complex<double>> h_row,
                                       const Allocation& alloc, const Scenario& sc, int i) {
  const int M = alloc.n_users;
  if (static_cast<int>(h_row.size()) != M)
    throw std::invalid_argument("realized_rates: channel row size mismatch");
  std::vector<RateTriple> out(M);
  for (int m = 0; m < M; ++m) {
    if (!alloc.s(i, m)) continue;
    double gain = std::norm(h_row[m]);
    double noise = sc.link(i, m).noise_w;
    double p_own = alloc.p(i, m);
    double p_other = 0.0;
    for (int n = 0; n < M; ++n)
      if (n != m && alloc.s(i, n)) p_other += alloc.p(i, n);
    out[m].c_sic = std::log2(1.0 + gain * p_other / (p_own * gain + noise));
    out[m].c1 = std::log2(1.0 + p_own * gain / noise);
    out[m].c2 = std::log2(1.0 + p_own * gain / (gain * p_other + noise));
  }
  return out;
}

std::vector<std::uint8_t> outage_event(std::span<const std::complex<double>> h_row,
                                       const Allocation& alloc, const Scenario& sc, int i) {
  const int M = alloc.n_users;
  std::vector<RateTriple> rates = realized_rates(h_row, alloc, sc, i);
  std::vector<std::uint8_t> out(M, 0);
  for (int m = 0; m < M; ++m) {
    if (!alloc.s(i, m)) continue;
    double r_own = alloc.r(i, m);
    double r_other = 0.0;
    for (int n = 0; n < M; ++n)
      if (n != m && alloc.s(i, n)) r_other += alloc.r(i, n);
    if (alloc.u(i, m)) {
      out[m] = (short_of(rates[m].c_sic, r_other) || short_of(rates[m].c1, r_own)) ? 1 : 0;
    } else {
      out[m] = short_of(rates[m].c2, r_own) ? 1 : 0;
    }
  }
  return out;
}

OutageResult monte_carlo_outage(const Allocation& alloc, const Scenario& sc, long trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_outage: trials must be positive");
  const int nf = sc.n_subcarriers(), M = sc.n_users();
  if (alloc.n_subcarriers != nf || alloc.n_users != M)
    throw std::invalid_argument("monte_carlo_outage: dimension mismatch");

  const int chunks = trials < kChunks ? 1 : kChunks;
  std::vector<std::vector<long>> counts(chunks);
  std::vector<std::vector<long>> user_counts(chunks);

  parallel_for(chunks, [&](int c) {
    long lo = trials * c / chunks, hi = trials * (c + 1) / chunks;
    RandomStream rng = RandomStream::substream(seed, {kTagOutage, static_cast<std::uint64_t>(c)});
    std::vector<long> cnt(static_cast<size_t>(nf) * M, 0);
    std::vector<long> ucnt(M, 0);
    std::vector<std::complex<double>> h(M);
    std::vector<std::uint8_t> user_hit(M);
    for (long t = lo; t < hi; ++t) {
      std::fill(user_hit.begin(), user_hit.end(), 0);
      for (int i = 0; i < nf; ++i) {
        for (int m = 0; m < M; ++m) h[m] = sample_true_channel(sc.link(i, m), rng);
        std::vector<std::uint8_t> ev = outage_event(h, alloc, sc, i);
        for (int m = 0; m < M; ++m) {
          if (ev[m]) {
            ++cnt[static_cast<size_t>(i) * M + m];
            user_hit[m] = 1;
          }
        }
      }
      for (int m = 0; m < M; ++m)
        if (user_hit[m]) ++ucnt[m];
    }
    counts[c] = std::move(cnt);
    user_counts[c] = std::move(ucnt);
  });

  OutageResult out;
  out.n_subcarriers = nf;
  out.n_users = M;
  out.trials = trials;
  out.freq.assign(static_cast<size_t>(nf) * M, 0.0);
  out.delta.resize(static_cast<size_t>(nf) * M);
  out.per_user.assign(M, 0.0);
  for (int i = 0; i < nf; ++i)
    for (int m = 0; m < M; ++m) out.delta[static_cast<size_t>(i) * M + m] = sc.link(i, m).delta;
  for (int c = 0; c < chunks; ++c) {
    for (size_t k = 0; k < out.freq.size(); ++k) out.freq[k] += counts[c][k];
    for (int m = 0; m < M; ++m) out.per_user[m] += user_counts[c][m];
  }
  for (double& f : out.freq) f /= static_cast<double>(trials);
  for (double& f : out.per_user) f /= static_cast<double>(trials);
  return out;
}

NaiveResult naive_allocation(const Scenario& sc, const DcOptions& opts) {
  NaiveResult out;
  out.naive_scenario = with_naive_thresholds(sc);
  DcResult r = solve_dc(out.naive_scenario, opts);
  out.allocation = std::move(r.allocation);
  out.report = std::move(r.report);
  out.report.method = "naive";
  return out;
}

}  // namespace noma
