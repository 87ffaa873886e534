#pragma once

#include <optional>
#include <span>
#include <utility>

#include "noma/allocation.hpp"
#include "noma/channel.hpp"

namespace noma {

/// Inputs for the closed-form two-user power expressions.
struct PairSpec {
  double beta_m = 0.0;   ///< CNR outage threshold of user m, 1/W
  double beta_n = 0.0;
  double gamma_m = 0.0;  ///< SINR target 2^R - 1
  double gamma_n = 0.0;
};

inline double sinr_target(double rate) { return std::exp2(rate) - 1.0; }

/// The user with the higher threshold performs SIC; ties go to the first.
std::pair<int, int> optimal_sic_order(double beta_m, double beta_n);

/// Minimum powers meeting both outage targets under the optimal SIC order.
std::pair<double, double> pair_powers(const PairSpec& spec);

/// gamma / beta, the single-user (OMA) minimum power.
double single_user_power(double beta, double gamma);

/// Minimum total power on one subcarrier for its scheduled set (at most two).
/// Throws std::invalid_argument when more than two entries are scheduled.
double subcarrier_power(std::span<const std::uint8_t> sched, std::span<const double> gamma,
                        std::span<const double> beta);

/// Sum of per-subcarrier minimum powers over the whole allocation.
double system_power(const Allocation& alloc, const Scenario& scenario);

enum class SicCase { I, II, III, IV };

/// Total power for each of the four SIC policies of a user pair, with user m
/// taken as the beta_m side. Cases III/IV require gamma_m * gamma_n < 1 and
/// case III additionally its two power-ordering prerequisites; when violated
/// there is no feasible power allocation and nullopt is returned.
std::optional<double> case_power(SicCase c, const PairSpec& spec);

inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1000.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

}  // namespace noma
