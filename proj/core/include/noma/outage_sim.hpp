#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/channel.hpp"
#include "noma/dc_solver.hpp"

namespace noma {

/// Decoding rates of one user on one subcarrier for a channel realization:
/// the rate for stripping the partner's signal, the post-SIC own rate, and
/// the direct-decoding own rate.
struct RateTriple {
  double c_sic = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Realized rates for every user on subcarrier i given true channels h_row.
std::vector<RateTriple> realized_rates(std::span<const std::complex<double>> h_row,
                                       const Allocation& alloc, const Scenario& scenario, int i);

/// Outage flags for subcarrier i: a SIC user fails when it cannot strip the
/// partner or, having stripped it, cannot decode itself; a non-SIC user
/// fails when direct decoding falls short. Unscheduled users never fail.
std::vector<std::uint8_t> outage_event(std::span<const std::complex<double>> h_row,
                                       const Allocation& alloc, const Scenario& scenario, int i);

struct OutageResult {
  int n_subcarriers = 0;
  int n_users = 0;
  long trials = 0;
  std::vector<double> freq;        ///< per-(i,m) outage frequency
  std::vector<double> delta;       ///< per-(i,m) target
  std::vector<double> per_user;    ///< frequency of any-subcarrier outage per user

  double f(int i, int m) const { return freq[static_cast<size_t>(i) * n_users + m]; }
  double d(int i, int m) const { return delta[static_cast<size_t>(i) * n_users + m]; }
};

/// Monte Carlo outage verification. Trials are split into fixed chunks with
/// seed-derived substreams, so the counts are independent of the worker
/// count. Requires trials >= 1.
OutageResult monte_carlo_outage(const Allocation& alloc, const Scenario& scenario, long trials,
                                std::uint64_t seed);

struct NaiveResult {
  Allocation allocation;
  Scenario naive_scenario;  ///< thresholds replaced by |h_hat|^2 / noise
  SolverReport report;
};

/// The estimate-trusting policy: thresholds recomputed as if the channel
/// estimate were exact, then the standard solver re-run. Its allocation is
/// meant to be evaluated against the original (uncertain) scenario.
NaiveResult naive_allocation(const Scenario& scenario, const DcOptions& opts = {});

}  // namespace noma
