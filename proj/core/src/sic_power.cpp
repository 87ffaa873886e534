#include "noma/sic_power.hpp"

#include <cmath>
#include <stdexcept>

namespace noma {

std::pair<int, int> optimal_sic_order(double beta_m, double beta_n) {
  if (!(beta_m > 0.0) || !(beta_n > 0.0))
    throw std::invalid_argument("optimal_sic_order: thresholds must be positive");
  return beta_m >= beta_n ? std::make_pair(1, 0) : std::make_pair(0, 1);
}

std::pair<double, double> pair_powers(const PairSpec& spec) {
  if (spec.beta_m >= spec.beta_n) {
    double p_m = spec.gamma_m / spec.beta_m;
    double p_n = spec.gamma_n / spec.beta_n + spec.gamma_n * spec.gamma_m / spec.beta_m;
    return {p_m, p_n};
  }
  double p_m = spec.gamma_m / spec.beta_m + spec.gamma_m * spec.gamma_n / spec.beta_n;
  double p_n = spec.gamma_n / spec.beta_n;
  return {p_m, p_n};
}

double single_user_power(double beta, double gamma) {
  if (!(beta > 0.0)) throw std::invalid_argument("single_user_power: threshold must be positive");
  if (gamma < 0.0) throw std::invalid_argument("single_user_power: negative SINR target");
  return gamma / beta;
}

double subcarrier_power(std::span<const std::uint8_t> sched, std::span<const double> gamma,
                        std::span<const double> beta) {
  const size_t n = sched.size();
  if (gamma.size() != n || beta.size() != n)
    throw std::invalid_argument("subcarrier_power: span size mismatch");
  int count = 0;
  double sum = 0.0;
  for (size_t m = 0; m < n; ++m) {
    if (!sched[m]) continue;
    ++count;
    sum += gamma[m] / beta[m];
  }
  if (count > 2) throw std::invalid_argument("subcarrier_power: more than two scheduled users");
  for (size_t m = 0; m + 1 < n; ++m) {
    if (!sched[m]) continue;
    for (size_t k = m + 1; k < n; ++k) {
      if (!sched[k]) continue;
      sum += gamma[m] * gamma[k] / std::max(beta[m], beta[k]);
    }
  }
  return sum;
}

double system_power(const Allocation& alloc, const Scenario& scenario) {
  if (alloc.n_subcarriers != scenario.n_subcarriers() || alloc.n_users != scenario.n_users())
    throw std::invalid_argument("system_power: dimension mismatch");
  double total = 0.0;
  std::vector<double> gamma(alloc.n_users), beta(alloc.n_users);
  std::vector<std::uint8_t> sched(alloc.n_users);
  for (int i = 0; i < alloc.n_subcarriers; ++i) {
    for (int m = 0; m < alloc.n_users; ++m) {
      sched[m] = alloc.s(i, m);
      gamma[m] = sched[m] ? sinr_target(alloc.r(i, m)) : 0.0;
      beta[m] = scenario.link(i, m).beta;
    }
    total += subcarrier_power(sched, gamma, beta);
  }
  return total;
}

std::optional<double> case_power(SicCase c, const PairSpec& spec) {
  PairSpec s = spec;
  SicCase cc = c;
  if (s.beta_m < s.beta_n) {
    // The appendix expressions presume beta_m >= beta_n; cases I/II swap with
    // the user roles while III/IV are symmetric.
    std::swap(s.beta_m, s.beta_n);
    std::swap(s.gamma_m, s.gamma_n);
    if (cc == SicCase::I) cc = SicCase::II;
    else if (cc == SicCase::II) cc = SicCase::I;
  }
  const double bm = s.beta_m, bn = s.beta_n, gm = s.gamma_m, gn = s.gamma_n;
  switch (cc) {
    case SicCase::I:
      return gm / bm + gn / bn + gm * gn / bm;
    case SicCase::II:
      return gn / bn + gm / bn + gm * gn / bn;
    case SicCase::III: {
      double denom = 1.0 - gm * gn;
      if (denom <= 0.0) return std::nullopt;
      double p_m = (gm / bn + gm * gn / bm) / denom;
      double p_n = (gn / bm + gm * gn / bn) / denom;
      if (p_m < gm / bm || p_n < gn / bn) return std::nullopt;
      return (gm / bn + gm * gn / bm + gn / bm + gm * gn / bn) / denom;
    }
    case SicCase::IV: {
      double denom = 1.0 - gm * gn;
      if (denom <= 0.0) return std::nullopt;
      return (gm / bm + gm * gn / bn + gn / bn + gm * gn / bm) / denom;
    }
  }
  return std::nullopt;
}

}  // namespace noma
