/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/traffic.hpp"

#include "femtocoop/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace femtocoop {

bool
satisfies_power_budget(const lease_terms& t, double p_max)
{
    if (!(t.alpha > 0.0 && t.alpha <= 1.0 && t.beta > 0.0 && t.beta <= 1.0))
        return false;
    if (t.relay_power < 0.0 || t.own_power < 0.0)
        return false;
    return t.beta * t.relay_power + (1.0 - t.beta) * t.own_power < p_max;
}

double
shannon_rate(double bandwidth_hz, double sinr)
{
    return bandwidth_hz * std::log2(1.0 + sinr);
}

double
effective_arrival(double lambda, double pt, int max_transmissions, arrival_mode mode)
{
    const double miss = 1.0 - pt;
    const double miss_all = std::pow(miss, max_transmissions);
    if (mode == arrival_mode::literal)
        return lambda * (1.0 - miss_all);
    // sum_{d=1..D} d Pt (1-Pt)^{d-1} + D (1-Pt)^D
    //   = (1 - (1-Pt)^D) / Pt for Pt > 0
    if (pt <= 0.0)
        return lambda * max_transmissions;
    return lambda * (1.0 - miss_all) / pt;
}

double
md1_delay(const queue_state& q)
{
    if (!(q.service > 0.0))
        throw std::domain_error("M/D/1 service rate must be positive");
    if (!q.stable())
        return infinite_delay;
    return q.arrival / (2.0 * q.service * (q.service - q.arrival));
}

payoff
power_payoff(double rate, double delay, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("delta must lie in (0, 1)");
    if (std::isinf(delay))
        return payoff{0.0, rate, delay, delta};
    if (!(delay > 0.0))
        throw std::domain_error("zero delay gives an unbounded power metric");
    return payoff{std::pow(rate, delta) / std::pow(delay, 1.0 - delta), rate, delay, delta};
}

relay_rate_result
relay_rates(std::span<const relay_member_link> members, double native_rate, double p_max)
{
    relay_rate_result out;
    out.fue_rate = native_rate;
    out.mue_rates.reserve(members.size());
    for (const auto& m : members)
    {
        if (!satisfies_power_budget(m.terms, p_max))
            throw infeasible_lease("lease terms exceed the relay power budget");
        const double a = m.terms.alpha;
        const double b = m.terms.beta;
        const double forward = a * b * m.fue_relay_rate;
        out.mue_rates.push_back(std::min((1.0 - a) * m.mue_relay_rate, forward));
        out.relay_service += forward;
        out.fue_rate += a * (1.0 - b) * m.fue_own_rate;
    }
    return out;
}

double
relay_arrival(double fue_lambda,
              std::span<const double> member_arrivals,
              double pt,
              int max_transmissions,
              arrival_mode mode)
{
    const double offered =
        fue_lambda + std::accumulate(member_arrivals.begin(), member_arrivals.end(), 0.0);
    return effective_arrival(offered, pt, max_transmissions, mode);
}

double
coop_delay(double mue_arrival, double mue_relay_rate, double relayed_arrival, double relay_service)
{
    if (!(mue_relay_rate > 0.0) || !(relay_service > 0.0))
        return infinite_delay;
    const double first = md1_delay({mue_arrival, mue_relay_rate});
    const double second = md1_delay({relayed_arrival, relay_service});
    return first + second;
}

double
coalition_value(std::span<const double> member_payoffs, bool cooperative)
{
    if (!cooperative || member_payoffs.size() < 2)
        return 0.0;
    return std::accumulate(member_payoffs.begin(), member_payoffs.end(), 0.0);
}

} // namespace femtocoop
