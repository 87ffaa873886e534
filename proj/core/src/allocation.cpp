#include "noma/allocation.hpp"

#include <stdexcept>
#include <string>

namespace noma {

double Allocation::total_power_w() const {
  double sum = 0.0;
  for (size_t k = 0; k < power_w.size(); ++k)
    if (sched[k]) sum += power_w[k];
  return sum;
}

std::vector<int> Allocation::users_on(int i) const {
  std::vector<int> out;
  for (int m = 0; m < n_users; ++m)
    if (s(i, m)) out.push_back(m);
  return out;
}

void check_allocation(const Allocation& a, const Scenario& scenario, int max_per_subcarrier,
                      double rate_tol) {
  if (a.n_subcarriers != scenario.n_subcarriers() || a.n_users != scenario.n_users())
    throw std::runtime_error("allocation: dimension mismatch with scenario");
  for (int i = 0; i < a.n_subcarriers; ++i) {
    auto users = a.users_on(i);
    if (static_cast<int>(users.size()) > max_per_subcarrier)
      throw std::runtime_error("allocation: too many users on subcarrier " + std::to_string(i));
    int sic_count = 0;
    for (int m = 0; m < a.n_users; ++m) {
      if (a.u(i, m)) {
        if (!a.s(i, m)) throw std::runtime_error("allocation: SIC flag on unscheduled user");
        if (users.size() < 2) throw std::runtime_error("allocation: SIC flag without a partner");
        ++sic_count;
      }
      if (a.p(i, m) > 0.0 && !a.s(i, m))
        throw std::runtime_error("allocation: power on unscheduled user");
      if (a.r(i, m) > 0.0 && !a.s(i, m))
        throw std::runtime_error("allocation: rate on unscheduled user");
    }
    if (sic_count > 1) throw std::runtime_error("allocation: more than one SIC user per subcarrier");
  }
  for (int m = 0; m < a.n_users; ++m) {
    double sum = 0.0;
    for (int i = 0; i < a.n_subcarriers; ++i)
      if (a.s(i, m)) sum += a.r(i, m);
    if (sum < scenario.rate_total[m] - rate_tol)
      throw std::runtime_error("allocation: user " + std::to_string(m) + " rate demand unmet");
  }
}

}  // namespace noma
