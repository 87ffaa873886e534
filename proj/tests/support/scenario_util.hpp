#pragma once

// Test helpers for building scenario shells with pinned thresholds.

#include <vector>

#include "noma/channel.hpp"

namespace testutil {

// Scenario with an explicit threshold grid (row-major [subcarrier][user]);
// channel fields beyond beta are filled with consistent placeholders.
inline noma::Scenario shell(int nf, int users, const std::vector<double>& beta,
                            const std::vector<double>& rate_total) {
  noma::Scenario sc;
  sc.config.n_subcarriers = nf;
  sc.config.n_users = users;
  sc.config.seed = 1;
  sc.rate_total = rate_total;
  sc.distances_m.assign(users, 100.0);
  sc.links.assign(nf, std::vector<noma::Link>(users));
  for (int i = 0; i < nf; ++i) {
    for (int m = 0; m < users; ++m) {
      noma::Link& l = sc.links[i][m];
      l.beta = beta[static_cast<size_t>(i) * users + m];
      l.noise_w = 1.0;
      l.delta = 0.05;
      l.err_var_abs = 0.0;
      l.h_hat = {1.0, 0.0};
    }
  }
  return sc;
}

}  // namespace testutil
