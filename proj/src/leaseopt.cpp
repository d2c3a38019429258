/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/leaseopt.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace femtocoop {

model_params
model_params::from(const scenario_config& cfg)
{
    model_params p;
    p.bandwidth_hz = cfg.channel.bandwidth_hz;
    p.delta = cfg.delta;
    p.p_max = cfg.p_max_w();
    p.max_transmissions = cfg.max_transmissions;
    p.arrivals = cfg.arrivals;
    p.relay_service = cfg.relay_service;
    return p;
}

payoff
bounded_payoff(double rate, double delay, double delta)
{
    if (!(delay > 0.0))
        return payoff{0.0, rate, delay, delta};
    return power_payoff(rate, delay, delta);
}

namespace {

// rate^delta / delay^(1-delta) in log form; zero for no or unbounded delay.
double
power_value(double rate, double delay, double delta)
{
    if (!(delay > 0.0) || std::isinf(delay) || !(rate > 0.0))
        return 0.0;
    return std::exp(delta * std::log(rate) - (1.0 - delta) * std::log(delay));
}

double
hop_delay(double arrival, double service)
{
    if (!(service > 0.0))
        return arrival > 0.0 ? infinite_delay : 0.0;
    return md1_delay({arrival, service});
}

} // namespace

coalition_payoffs
evaluate_coalition(const coalition_inputs& in, const model_params& p)
{
    coalition_payoffs out;
    std::vector<relay_member_link> links;
    std::vector<double> arrivals;
    links.reserve(in.members.size());
    for (const auto& m : in.members)
    {
        const auto& t = m.terms;
        links.push_back({m.relay_rate,
                         shannon_rate(p.bandwidth_hz, t.relay_power * m.q),
                         shannon_rate(p.bandwidth_hz, t.own_power * m.q),
                         t});
        arrivals.push_back(m.arrival);
    }
    const auto rates = relay_rates(links, in.native_rate, p.p_max);
    out.mue_rates = rates.mue_rates;
    out.relay_service = rates.relay_service;

    const double fue_arrival =
        effective_arrival(in.fue_lambda, in.fue_pt, p.max_transmissions, p.arrivals);
    out.relayed_arrival = relay_arrival(0.0, arrivals, in.fue_pt, p.max_transmissions, p.arrivals);

    double fue_delay = 0.0;
    if (p.relay_service == relay_service_mode::relay_slice)
    {
        out.relay_hop_delay = hop_delay(out.relayed_arrival, out.relay_service);
        fue_delay = hop_delay(fue_arrival, rates.fue_rate);
    }
    else
    {
        // Relayed and own traffic share one queue served at the FUE's rate.
        out.relay_hop_delay = hop_delay(fue_arrival + out.relayed_arrival, rates.fue_rate);
        fue_delay = out.relay_hop_delay;
    }
    out.fue = bounded_payoff(rates.fue_rate, fue_delay, p.delta);

    for (std::size_t i = 0; i < in.members.size(); ++i)
    {
        const auto& m = in.members[i];
        double d = infinite_delay;
        if (m.relay_rate > 0.0 && !std::isinf(out.relay_hop_delay))
            d = md1_delay({m.arrival, m.relay_rate}) + out.relay_hop_delay;
        out.mues.push_back(bounded_payoff(out.mue_rates[i], d, p.delta));
    }
    return out;
}

namespace {

// Strict gain over a reference, ignoring rounding-level differences between
// the lease evaluator and the partition evaluator.
bool
gains(double x, double ref)
{
    return x > ref + 1e-9 * std::abs(ref);
}

class lease_search
{
  public:
    explicit lease_search(const lease_problem& pr)
        : pr_(pr),
          n_beta_(std::max(1, static_cast<int>(std::lround(1.0 / pr.beta_step)))),
          n_t_(std::max(1, pr.power_points)),
          budget_(pr.params.p_max * (1.0 - 1e-9))
    {
        const auto& p = pr.params;
        for (const auto& m : pr.base.members)
        {
            const auto& t = m.terms;
            own0_ += t.alpha * (1.0 - t.beta) * shannon_rate(p.bandwidth_hz, t.own_power * m.q);
            service0_ += t.alpha * t.beta * shannon_rate(p.bandwidth_hz, t.relay_power * m.q);
            lambda0_ += m.arrival;
        }
        own0_ += pr.base.native_rate;
        factor_ = effective_arrival(1.0, pr.base.fue_pt, p.max_transmissions, p.arrivals);
        fue_arrival_ =
            effective_arrival(pr.base.fue_lambda, pr.base.fue_pt, p.max_transmissions, p.arrivals);
        relayed_ = factor_ * (lambda0_ + pr.joiner.arrival);
        first_hop_ = pr.joiner.relay_rate > 0.0
                         ? md1_delay({pr.joiner.arrival, pr.joiner.relay_rate})
                         : infinite_delay;
        if (!pr.base.members.empty())
        {
            const auto now = evaluate_coalition(pr.base, p);
            existing_hop_ = now.relay_hop_delay;
        }

        relay_.resize(static_cast<std::size_t>(n_beta_) * n_t_);
        own_.resize(relay_.size());
        for (int b = 1; b <= n_beta_; ++b)
        {
            for (int j = 1; j <= n_t_; ++j)
            {
                const auto [pr_w, pt_w] = powers(b, j);
                relay_[idx(b, j)] = shannon_rate(p.bandwidth_hz, pr_w * pr.joiner.q);
                own_[idx(b, j)] = shannon_rate(p.bandwidth_hz, pt_w * pr.joiner.q);
                max_forward_ = std::max(max_forward_, beta_of(b) * relay_[idx(b, j)]);
                max_own_ = std::max(max_own_, (1.0 - beta_of(b)) * own_[idx(b, j)]);
            }
        }
    }

    /// Joiner payoff no lease at this alpha can beat: full forwarding
    /// capacity on both the rate cap and the relay queue.
    double mue_bound(double alpha) const
    {
        const double fwd = alpha * max_forward_;
        const double mu = std::min((1.0 - alpha) * pr_.joiner.relay_rate, fwd);
        const double hop = hop_delay(relayed_, service0_ + fwd);
        if (pr_.params.relay_service != relay_service_mode::relay_slice)
            return infinite_delay;
        return power_value(mu, first_hop_ + hop, pr_.params.delta);
    }

    /// FUE payoff no lease at this alpha can beat (relay-slice service).
    double fue_bound(double alpha) const
    {
        const double own = own0_ + alpha * max_own_;
        return power_value(own, hop_delay(fue_arrival_, own), pr_.params.delta);
    }

    lease_result run(double alpha, const lease_trace& trace) const
    {
        lease_result best;
        if (!(pr_.params.p_max > 0.0) || !(alpha > 0.0 && alpha <= 1.0))
            return best;
        const bool monotone = pr_.params.relay_service == relay_service_mode::relay_slice;
        if (monotone && !trace && (!(mue_bound(alpha) > pr_.mue_ref) || !(fue_bound(alpha) > pr_.fue_ref)))
            return best;
        for (int b = 1; b <= n_beta_; ++b)
        {
            if (!monotone)
            {
                for (int j = 1; j <= n_t_; ++j)
                    consider(alpha, b, j, eval(alpha, b, j, trace), best);
                continue;
            }
            // The FUE payoff falls and the joiner's rises as t grows, so the
            // feasible t form one interval; bracket it by bisection.
            int lo = 1;
            int hi = n_t_;
            if (!eval(alpha, b, 1, trace).fue_ok)
                continue;
            while (lo < hi)
            {
                const int mid = (lo + hi + 1) / 2;
                if (eval(alpha, b, mid, trace).fue_ok)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            const int last = lo;
            if (!eval(alpha, b, last, trace).mue_ok)
                continue;
            lo = 1;
            hi = last;
            while (lo < hi)
            {
                const int mid = (lo + hi) / 2;
                if (eval(alpha, b, mid, trace).mue_ok)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            const int first = lo;
            if (pr_.objective == lease_objective::fue_payoff)
            {
                consider(alpha, b, first, eval(alpha, b, first, trace), best);
                continue;
            }
            for (int j = first; j <= last; ++j)
                consider(alpha, b, j, eval(alpha, b, j, trace), best);
        }
        return best;
    }

  private:
    struct point
    {
        double x_m;
        double x_l;
        bool fue_ok; ///< FUE strictly above its reference
        bool mue_ok; ///< joiner strictly above its reference, members no worse
    };

    point eval(double alpha, int b, int j, const lease_trace& trace) const
    {
        const auto& p = pr_.params;
        const double beta = beta_of(b);
        const double r = relay_[idx(b, j)];
        const double o = own_[idx(b, j)];
        const double mu_c = std::min((1.0 - alpha) * pr_.joiner.relay_rate, alpha * beta * r);
        const double service = service0_ + alpha * beta * r;
        const double own = own0_ + alpha * (1.0 - beta) * o;
        double hop, fue_delay;
        if (p.relay_service == relay_service_mode::relay_slice)
        {
            hop = hop_delay(relayed_, service);
            fue_delay = hop_delay(fue_arrival_, own);
        }
        else
        {
            hop = hop_delay(fue_arrival_ + relayed_, own);
            fue_delay = hop;
        }
        const double d_m = std::isinf(first_hop_) || std::isinf(hop) ? infinite_delay : first_hop_ + hop;
        point pt;
        pt.x_l = power_value(own, fue_delay, p.delta);
        pt.x_m = power_value(mu_c, d_m, p.delta);
        pt.fue_ok = gains(pt.x_l, pr_.fue_ref);
        pt.mue_ok = gains(pt.x_m, pr_.mue_ref) && hop <= existing_hop_ * (1.0 + 1e-12);
        if (trace)
            trace({alpha, beta, t_of(j), pt.x_m, pt.x_l, pt.fue_ok && pt.mue_ok});
        return pt;
    }

    void consider(double alpha, int b, int j, const point& pt, lease_result& best) const
    {
        if (!(pt.fue_ok && pt.mue_ok))
            return;
        const double obj = pr_.objective == lease_objective::fue_payoff
                               ? pt.x_l
                               : (pt.x_m - pr_.mue_ref) * (pt.x_l - pr_.fue_ref);
        if (best.feasible && !(obj > best.objective))
            return;
        const auto [pr_w, pt_w] = powers(b, j);
        best.feasible = true;
        best.objective = obj;
        best.terms = {alpha, beta_of(b), pr_w, pt_w};
        best.mue_payoff = pt.x_m;
        best.fue_payoff = pt.x_l;
    }

    std::size_t idx(int b, int j) const { return static_cast<std::size_t>(b - 1) * n_t_ + (j - 1); }
    double beta_of(int b) const { return static_cast<double>(b) / n_beta_; }
    double t_of(int j) const { return static_cast<double>(j) / (n_t_ + 1); }

    std::pair<double, double> powers(int b, int j) const
    {
        const double beta = beta_of(b);
        const double t = t_of(j);
        const double relay = t * budget_ / beta;
        const double own = b == n_beta_ ? 0.0 : (1.0 - t) * budget_ / (1.0 - beta);
        return {relay, own};
    }

    const lease_problem& pr_;
    int n_beta_;
    int n_t_;
    double budget_;
    double own0_ = 0.0;
    double service0_ = 0.0;
    double lambda0_ = 0.0;
    double factor_ = 1.0;
    double fue_arrival_ = 0.0;
    double relayed_ = 0.0;
    double first_hop_ = 0.0;
    double existing_hop_ = infinite_delay;
    double max_forward_ = 0.0;
    double max_own_ = 0.0;
    std::vector<double> relay_;
    std::vector<double> own_;
};

} // namespace

lease_result
optimize_lease(const lease_problem& problem, double alpha, const lease_trace& trace)
{
    return lease_search(problem).run(alpha, trace);
}

lease_result
negotiate_alpha(const lease_problem& problem, const lease_trace& trace)
{
    lease_result best;
    if (!(problem.params.p_max > 0.0))
        return best;
    const lease_search search(problem);
    const int n = std::max(1, static_cast<int>(std::lround(1.0 / problem.alpha_step)));
    std::vector<std::pair<double, int>> order;
    for (int i = 1; i <= n; ++i)
        order.emplace_back(trace ? 0.0 : -search.mue_bound(static_cast<double>(i) / n), i);
    // most promising alpha first so weaker ones can be skipped
    std::stable_sort(order.begin(), order.end());
    for (const auto& [neg_bound, i] : order)
    {
        if (best.feasible && -neg_bound < best.mue_payoff)
            break;
        const double alpha = static_cast<double>(i) / n;
        const auto r = search.run(alpha, trace);
        if (!r.feasible)
            continue;
        if (!best.feasible || r.mue_payoff > best.mue_payoff ||
            (r.mue_payoff == best.mue_payoff && alpha < best.terms.alpha))
            best = r;
    }
    return best;
}

lease_trace
csv_trace(std::ostream& os)
{
    os << "alpha,beta,t,mue_payoff,fue_payoff,feasible\n";
    return [&os](const lease_trace_point& p) {
        os << p.alpha << ',' << p.beta << ',' << p.t << ',' << p.mue_payoff << ',' << p.fue_payoff
           << ',' << (p.feasible ? 1 : 0) << '\n';
    };
}

} // namespace femtocoop
