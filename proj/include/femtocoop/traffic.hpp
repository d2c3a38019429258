/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_TRAFFIC_HPP
#define FEMTOCOOP_TRAFFIC_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace femtocoop {

inline constexpr double infinite_delay = std::numeric_limits<double>::infinity();

/// How retransmissions change the offered load.
enum class arrival_mode : std::uint8_t
{
    /// lambda * sum_{d=1..D} Pt (1-Pt)^{d-1}: the delivered fraction.
    literal,
    /// lambda * expected number of transmission attempts (at most D).
    expected_transmissions,
};

/// Service rate of the relay hop at the FUE.
enum class relay_service_mode : std::uint8_t
{
    /// Relayed traffic is served in the forwarding slices alpha*beta*mu_l^R.
    relay_slice,
    /// Relayed traffic is served at the FUE's own cooperative rate mu_l^C.
    fue_own_rate,
};

struct queue_state
{
    double arrival = 0.0; ///< bits/s
    double service = 0.0; ///< bits/s

    bool stable() const { return arrival < service; }
};

/// Spectrum-lease terms for one serviced MUE.
struct lease_terms
{
    double alpha = 0.0;       ///< superframe fraction granted to the relay FUE
    double beta = 0.0;        ///< share of alpha used to forward the MUE's traffic
    double relay_power = 0.0; ///< W, FUE power while forwarding
    double own_power = 0.0;   ///< W, FUE power in its own-traffic slice

    friend bool operator==(const lease_terms&, const lease_terms&) = default;
};

/// beta*P^R + (1-beta)*P^T < P_max, with alpha and beta in (0, 1].
bool satisfies_power_budget(const lease_terms& terms, double p_max);

struct payoff
{
    double value = 0.0; ///< rate^delta / delay^(1-delta)
    double rate = 0.0;
    double delay = 0.0;
    double delta = 0.5;
};

double shannon_rate(double bandwidth_hz, double sinr);

/// Offered load after HARQ retransmissions, at most `max_transmissions`
/// attempts per packet.
double effective_arrival(double lambda,
                         double success_prob,
                         int max_transmissions,
                         arrival_mode mode = arrival_mode::literal);

/// Mean M/D/1 waiting time lambda / (2 mu (mu - lambda)); infinite when
/// the queue is unstable.
double md1_delay(const queue_state& q);

/// Throws std::domain_error on zero delay (the power metric is unbounded)
/// or delta outside (0, 1).
payoff power_payoff(double rate, double delay, double delta);

/// Link rates feeding one member's relay path.
struct relay_member_link
{
    double mue_relay_rate = 0.0; ///< MUE -> FUE first hop, mu_m^R
    double fue_relay_rate = 0.0; ///< FUE -> FAP at the relay power, on the MUE's subchannel
    double fue_own_rate = 0.0;   ///< FUE -> FAP at the own-traffic power, same subchannel
    lease_terms terms;
};

struct relay_rate_result
{
    std::vector<double> mue_rates; ///< mu_m^C per member
    double fue_rate = 0.0;         ///< FUE own-traffic rate
    double relay_service = 0.0;    ///< sum of forwarding slices
};

/// Cooperative rates: mu_m^C = min{(1-alpha) mu_m^R, alpha beta mu_l^R};
/// the FUE keeps `native_rate` and adds alpha (1-beta) mu_l^R per member.
/// Throws infeasible_lease if any member's terms break the power budget.
relay_rate_result relay_rates(std::span<const relay_member_link> members,
                              double native_rate,
                              double p_max);

/// Traffic offered to the relay FUE's access link:
/// (lambda_l + sum lambda~_m) * delivery factor of the FUE link.
double relay_arrival(double fue_lambda,
                     std::span<const double> member_arrivals,
                     double fue_success_prob,
                     int max_transmissions,
                     arrival_mode mode = arrival_mode::literal);

/// Two-hop delay of one relayed MUE: M/D/1 on the D2D hop plus M/D/1 at the
/// FUE's relay queue. Infinite if either hop is unstable.
double coop_delay(double mue_arrival,
                  double mue_relay_rate,
                  double relayed_arrival,
                  double relay_service);

/// Sum of member payoffs for a cooperative coalition, 0 otherwise.
double coalition_value(std::span<const double> member_payoffs, bool cooperative);

} // namespace femtocoop

#endif
