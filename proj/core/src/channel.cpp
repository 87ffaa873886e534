#include "noma/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "noma/ncx2.hpp"

namespace noma {

namespace {
constexpr std::uint64_t kTagGrid = 0x67726964ULL;   // draws for a regenerated grid
constexpr double kBetaFloor = 1e-300;
}  // namespace

double SystemConfig::noise_w() const { return std::pow(10.0, noise_dbm / 10.0) / 1000.0; }

bool SystemConfig::overload_condition_holds() const {
  int need = (n_users + 1) / 2;
  return n_subcarriers >= need && n_subcarriers <= n_users;
}

void SystemConfig::validate() const {
  if (n_subcarriers < 1 || n_users < 1) throw std::invalid_argument("config: dimensions must be positive");
  if (min_distance_m <= 0.0 || cell_radius_m < min_distance_m)
    throw std::invalid_argument("config: need 0 < min_distance <= cell_radius");
  if (!(err_var >= 0.0) || err_var >= 1.0) throw std::invalid_argument("config: err_var must be in [0, 1)");
  if (!(outage_range.lo > 0.0) || outage_range.hi >= 1.0 || outage_range.hi < outage_range.lo)
    throw std::invalid_argument("config: outage_range must lie inside (0, 1)");
  if (!(rate_range.lo > 0.0) || rate_range.hi < rate_range.lo)
    throw std::invalid_argument("config: rate_range must be positive");
  if (noise_dbm > 100.0) throw std::invalid_argument("config: implausible noise level");
}

void Scenario::validate() const {
  config.validate();
  if (static_cast<int>(links.size()) != config.n_subcarriers ||
      static_cast<int>(rate_total.size()) != config.n_users)
    throw std::invalid_argument("scenario: dimension mismatch");
  for (const auto& row : links) {
    if (static_cast<int>(row.size()) != config.n_users)
      throw std::invalid_argument("scenario: ragged link grid");
    for (const Link& l : row) {
      if (!(l.beta > 0.0) || !std::isfinite(l.beta))
        throw std::invalid_argument("scenario: thresholds must be finite and positive");
    }
  }
  for (double r : rate_total) {
    if (!(r > 0.0)) throw std::invalid_argument("scenario: rate demands must be positive");
  }
}

double path_loss(double distance_m, const SystemConfig& cfg) {
  if (distance_m < cfg.min_distance_m)
    throw std::invalid_argument("path_loss: distance below minimum");
  double pl_db = cfg.pathloss_intercept_db + 10.0 * cfg.pathloss_exponent * std::log10(distance_m);
  return std::pow(10.0, pl_db / 10.0);
}

double cnr_outage_threshold(std::complex<double> h_hat, double err_var_abs, double noise_w,
                            double delta) {
  if (!(noise_w > 0.0)) throw std::invalid_argument("cnr_outage_threshold: noise must be positive");
  if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("cnr_outage_threshold: delta must be in (0, 1)");
  double gain = std::norm(h_hat);
  if (err_var_abs <= 0.0) return gain / noise_w;
  double lambda = 2.0 * gain / err_var_abs;
  double q = ncx2_quantile(delta, lambda);
  double beta = (err_var_abs / 2.0) * q / noise_w;
  return beta < kBetaFloor ? 0.0 : beta;
}

Scenario sample_links(const SystemConfig& cfg, RandomStream& rng) {
  cfg.validate();
  Scenario s;
  s.config = cfg;
  s.distances_m.resize(cfg.n_users);
  s.rate_total.resize(cfg.n_users);

  for (int m = 0; m < cfg.n_users; ++m)
    s.distances_m[m] = rng.uniform(cfg.min_distance_m, cfg.cell_radius_m);
  for (int m = 0; m < cfg.n_users; ++m)
    s.rate_total[m] = rng.uniform(cfg.rate_range.lo, cfg.rate_range.hi);

  const double noise = cfg.noise_w();
  s.links.assign(cfg.n_subcarriers, std::vector<Link>(cfg.n_users));
  for (int i = 0; i < cfg.n_subcarriers; ++i) {
    for (int m = 0; m < cfg.n_users; ++m) {
      double pl = path_loss(s.distances_m[m], cfg);
      Link& l = s.links[i][m];
      l.noise_w = noise;
      l.delta = rng.log_uniform(cfg.outage_range.lo, cfg.outage_range.hi);
      // Var(h) = 1/PL total; the estimate carries the (1 - kappa^2) share.
      l.h_hat = rng.complex_normal((1.0 - cfg.err_var) / pl);
      l.err_var_abs = cfg.err_var / pl;
      l.beta = cnr_outage_threshold(l.h_hat, l.err_var_abs, l.noise_w, l.delta);
      if (!(l.beta > 0.0)) l.beta = kBetaFloor;  // a dead link, never schedulable in practice
    }
  }
  return s;
}

Scenario sample_links(const SystemConfig& cfg) {
  RandomStream rng(cfg.seed);
  return sample_links(cfg, rng);
}

std::complex<double> sample_true_channel(const Link& link, RandomStream& rng) {
  if (link.err_var_abs <= 0.0) return link.h_hat;
  return link.h_hat + rng.complex_normal(link.err_var_abs);
}

Scenario regenerate_grid(const Scenario& s, int n_subcarriers, bool scale_noise_with_bw) {
  if (n_subcarriers < 1) throw std::invalid_argument("regenerate_grid: need at least one subcarrier");
  Scenario out;
  out.config = s.config;
  double bw_scale = static_cast<double>(s.config.n_subcarriers) / n_subcarriers;
  out.config.n_subcarriers = n_subcarriers;
  out.config.subcarrier_bw_hz = s.config.subcarrier_bw_hz * bw_scale;
  if (scale_noise_with_bw)
    out.config.noise_dbm = s.config.noise_dbm + 10.0 * std::log10(bw_scale);
  out.distances_m = s.distances_m;
  out.rate_total = s.rate_total;

  RandomStream rng = RandomStream::substream(s.config.seed, {kTagGrid, static_cast<std::uint64_t>(n_subcarriers)});
  const double noise = out.config.noise_w();
  const int users = s.config.n_users;
  out.links.assign(n_subcarriers, std::vector<Link>(users));
  for (int i = 0; i < n_subcarriers; ++i) {
    for (int m = 0; m < users; ++m) {
      double pl = path_loss(out.distances_m[m], out.config);
      Link& l = out.links[i][m];
      l.noise_w = noise;
      l.delta = rng.log_uniform(out.config.outage_range.lo, out.config.outage_range.hi);
      l.h_hat = rng.complex_normal((1.0 - out.config.err_var) / pl);
      l.err_var_abs = out.config.err_var / pl;
      l.beta = cnr_outage_threshold(l.h_hat, l.err_var_abs, l.noise_w, l.delta);
      if (!(l.beta > 0.0)) l.beta = kBetaFloor;
    }
  }
  return out;
}

Scenario with_naive_thresholds(const Scenario& s) {
  Scenario out = s;
  for (auto& row : out.links) {
    for (Link& l : row) {
      l.beta = std::norm(l.h_hat) / l.noise_w;
      if (!(l.beta > 0.0)) l.beta = kBetaFloor;
    }
  }
  return out;
}

}  // namespace noma
