/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_LEASEOPT_HPP
#define FEMTOCOOP_LEASEOPT_HPP

#include "femtocoop/config.hpp"
#include "femtocoop/traffic.hpp"

#include <functional>
#include <vector>

namespace femtocoop {

/// Scalar model constants shared by coalition evaluation and the lease search.
struct model_params
{
    double bandwidth_hz = 180e3;
    double delta = 0.5;
    double p_max = 0.1; ///< W
    int max_transmissions = 4;
    arrival_mode arrivals = arrival_mode::literal;
    relay_service_mode relay_service = relay_service_mode::relay_slice;

    static model_params from(const scenario_config& cfg);
};

/// Payoff that treats a zero delay (no offered traffic) as a zero payoff
/// instead of an unbounded one.
payoff bounded_payoff(double rate, double delay, double delta);

/// One serviced MUE as seen by its relay FUE.
struct member_inputs
{
    double arrival = 0.0;    ///< lambda~_m
    double relay_rate = 0.0; ///< mu_m^R, D2D first hop
    /// FUE -> FAP gain over (interference + noise) on the member's
    /// subchannel; the relay rate at power P is B log2(1 + P q).
    double q = 0.0;
    lease_terms terms;
};

/// Everything a cooperative coalition's payoffs depend on once the rest of
/// the partition is fixed.
struct coalition_inputs
{
    double fue_lambda = 0.0;  ///< lambda_l before retransmissions
    double fue_pt = 1.0;      ///< success probability on the FUE's native link
    double native_rate = 0.0; ///< 0 when a member occupies the native subchannel
    std::vector<member_inputs> members;
};

struct coalition_payoffs
{
    std::vector<payoff> mues;
    payoff fue;
    std::vector<double> mue_rates; ///< mu_m^C
    double relay_service = 0.0;
    double relayed_arrival = 0.0;
    double relay_hop_delay = 0.0;
};

coalition_payoffs evaluate_coalition(const coalition_inputs& in, const model_params& p);

/// Join of one MUE to an FUE's coalition (possibly empty). Existing members
/// keep their terms; only the joiner's (alpha, beta, P^R, P^T) are searched.
struct lease_problem
{
    coalition_inputs base; ///< existing coalition, native rate already adjusted for the joiner
    member_inputs joiner;  ///< terms ignored
    double mue_ref = 0.0;  ///< joiner vetoes unless above by more than 1e-9 relative
    double fue_ref = 0.0;  ///< FUE refuses unless above by more than 1e-9 relative
    model_params params;
    double alpha_step = 0.05;
    double beta_step = 0.01;
    int power_points = 64;
    lease_objective objective = lease_objective::nash_bargaining;
};

struct lease_result
{
    bool feasible = false;
    lease_terms terms;
    double mue_payoff = 0.0;
    double fue_payoff = 0.0;
    double objective = 0.0;
};

/// One evaluated grid point, for optimizer traces.
struct lease_trace_point
{
    double alpha, beta, t, mue_payoff, fue_payoff;
    bool feasible;
};

using lease_trace = std::function<void(const lease_trace_point&)>;

/// Best (beta, P^R, P^T) for a fixed alpha under the power budget, the
/// joiner's veto, the FUE's participation constraint and the rule that
/// existing members lose nothing. Power split: P^R = t P/beta and
/// P^T = (1-t) P/(1-beta) with t on an interior grid i/(n+1).
lease_result optimize_lease(const lease_problem& problem,
                            double alpha,
                            const lease_trace& trace = nullptr);

/// Alpha chosen by the MUE: its payoff argmax over the alpha grid among
/// values the FUE accepts. Infeasible result means no cooperation.
lease_result negotiate_alpha(const lease_problem& problem, const lease_trace& trace = nullptr);

/// CSV writer usable as a trace sink: `alpha,beta,t,mue_payoff,fue_payoff,feasible`.
lease_trace csv_trace(std::ostream& os);

} // namespace femtocoop

#endif
