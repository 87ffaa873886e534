#pragma once

#include <cstdint>
#include <vector>

#include "noma/channel.hpp"

namespace noma {

/// Scheduling, SIC order, power and rate for every (subcarrier, user).
struct Allocation {
  int n_subcarriers = 0;
  int n_users = 0;
  std::vector<std::uint8_t> sched;  ///< s_{i,m}
  std::vector<std::uint8_t> sic;    ///< u_{i,m}
  std::vector<double> power_w;      ///< p_{i,m} in watts
  std::vector<double> rate;         ///< r_{i,m} in bit/s/Hz

  Allocation() = default;
  Allocation(int nf, int users)
      : n_subcarriers(nf),
        n_users(users),
        sched(static_cast<size_t>(nf) * users, 0),
        sic(static_cast<size_t>(nf) * users, 0),
        power_w(static_cast<size_t>(nf) * users, 0.0),
        rate(static_cast<size_t>(nf) * users, 0.0) {}

  size_t idx(int i, int m) const { return static_cast<size_t>(i) * n_users + m; }
  std::uint8_t s(int i, int m) const { return sched[idx(i, m)]; }
  std::uint8_t u(int i, int m) const { return sic[idx(i, m)]; }
  double p(int i, int m) const { return power_w[idx(i, m)]; }
  double r(int i, int m) const { return rate[idx(i, m)]; }
  std::uint8_t& s(int i, int m) { return sched[idx(i, m)]; }
  std::uint8_t& u(int i, int m) { return sic[idx(i, m)]; }
  double& p(int i, int m) { return power_w[idx(i, m)]; }
  double& r(int i, int m) { return rate[idx(i, m)]; }

  double total_power_w() const;
  /// Users scheduled on subcarrier i, in index order.
  std::vector<int> users_on(int i) const;
};

/// Validates the structural invariants against a scenario: at most
/// `max_per_subcarrier` users per subcarrier, SIC flags only on paired
/// scheduled users, positive power only on scheduled entries, and per-user
/// total rate within `rate_tol` of the demand. Throws std::runtime_error.
void check_allocation(const Allocation& a, const Scenario& scenario, int max_per_subcarrier = 2,
                      double rate_tol = 1e-6);

}  // namespace noma
