#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "noma/random.hpp"

namespace noma {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// System level parameters for scenario generation.
struct SystemConfig {
  int n_subcarriers = 8;
  int n_users = 12;
  double cell_radius_m = 500.0;
  double min_distance_m = 30.0;
  double carrier_hz = 1.9e9;
  double subcarrier_bw_hz = 15e3;
  double noise_dbm = -128.0;
  double pathloss_exponent = 3.6;
  double pathloss_intercept_db = 38.0;
  double err_var = 0.1;                  ///< kappa^2, estimation error share of the channel variance
  Interval outage_range{1e-5, 1e-1};     ///< delta, drawn log-uniformly
  Interval rate_range{1.0, 10.0};        ///< per-user total rate demand, bit/s/Hz
  std::uint64_t seed = 1;

  double noise_w() const;
  /// Throws std::invalid_argument on out-of-domain parameters. Dimension
  /// combinations outside ceil(M/2) <= N_F <= M are allowed (underloaded or
  /// sparse systems); callers may warn but generation proceeds.
  void validate() const;
  bool overload_condition_holds() const;
};

/// One (subcarrier, user) channel with its robustness threshold.
struct Link {
  std::complex<double> h_hat;   ///< estimated channel coefficient
  double err_var_abs = 0.0;     ///< variance of the estimation error (linear)
  double noise_w = 0.0;         ///< noise power in watts
  double delta = 0.0;           ///< required outage probability
  double beta = 0.0;            ///< CNR outage threshold, 1/W
};

struct Scenario {
  SystemConfig config;
  std::vector<std::vector<Link>> links;  ///< [subcarrier][user]
  std::vector<double> rate_total;        ///< per-user demand, bit/s/Hz
  std::vector<double> distances_m;       ///< per-user distance (kept so grids can be rebuilt)

  int n_subcarriers() const { return static_cast<int>(links.size()); }
  int n_users() const { return links.empty() ? 0 : static_cast<int>(links.front().size()); }
  const Link& link(int i, int m) const { return links[i][m]; }

  void validate() const;
};

/// Linear path attenuation: PL_dB = intercept + 10 * exponent * log10(d).
double path_loss(double distance_m, const SystemConfig& cfg);

/// Threshold beta such that P(|h|^2 / noise < beta | h_hat) = delta.
/// Conditionally on h_hat, |h|^2 = (err_var_abs / 2) * ncx2(2, 2|h_hat|^2 / err_var_abs).
double cnr_outage_threshold(std::complex<double> h_hat, double err_var_abs, double noise_w,
                            double delta);

/// Draws a full scenario from an explicit stream.
Scenario sample_links(const SystemConfig& cfg, RandomStream& rng);
/// Same, with the stream derived from cfg.seed (the determinism contract).
Scenario sample_links(const SystemConfig& cfg);

/// One realization of the true channel h = h_hat + error.
std::complex<double> sample_true_channel(const Link& link, RandomStream& rng);

/// Rebuilds the fading grid with a different subcarrier count while keeping
/// the users (distances and demands). The new draws come from a substream of
/// the scenario seed so the result is deterministic. Used by the OMA baseline
/// where the subcarrier spacing is rescaled by a factor nf_old / nf_new;
/// noise per subcarrier is kept unless scale_noise_with_bw is set.
Scenario regenerate_grid(const Scenario& s, int n_subcarriers, bool scale_noise_with_bw);

/// Copy of the scenario with every threshold replaced by the perfect-CSIT
/// value |h_hat|^2 / noise, i.e. the channel estimate trusted as exact.
Scenario with_naive_thresholds(const Scenario& s);

}  // namespace noma
