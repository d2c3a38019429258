/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/coalition.hpp"

#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>

namespace femtocoop {

partition
partition::singletons(int n_mues, int n_fues)
{
    partition p;
    for (int l = 0; l < n_fues; ++l)
        p.coalitions.push_back(coalition::lone_fue(l));
    for (int m = 0; m < n_mues; ++m)
        p.coalitions.push_back(coalition::lone_mue(m));
    return p;
}

bool
dominates(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& s)
{
    bool strict = false;
    for (int i : s)
    {
        if (x[i] < y[i])
            return false;
        if (x[i] > y[i])
            strict = true;
    }
    return strict;
}

namespace {

node_ref
mue_node(int m)
{
    return {node_kind::mue, m};
}

node_ref
fue_node(int l)
{
    return {node_kind::fue, l};
}

node_ref
fap_node(int n)
{
    return {node_kind::fap, n};
}

double
total(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0);
}

std::uint64_t
link_seed(std::uint64_t round_seed, node_ref a, node_ref b)
{
    const auto ka = (static_cast<std::uint64_t>(a.kind) << 32) | static_cast<std::uint32_t>(a.index);
    const auto kb = (static_cast<std::uint64_t>(b.kind) << 32) | static_cast<std::uint32_t>(b.index);
    return derive_seed(round_seed, splitmix64(ka) ^ kb, stream_tag::fading);
}

struct direct_link
{
    payoff x;
    double arrival; ///< lambda~ after retransmissions
};

// Payoff of a lone transmitter on a direct link.
direct_link
direct_payoff(const game_model& g,
              node_ref tx,
              node_ref rx,
              double power,
              const std::vector<double>& interferers,
              double gamma,
              double lambda)
{
    const auto& p = g.params();
    const auto& ch = g.channel();
    const double signal = power * g.gain(tx, rx);
    const double pt = success_probability(signal,
                                          interferers,
                                          gamma,
                                          ch.params(),
                                          link_seed(g.topology().seed, tx, rx));
    const double rate = shannon_rate(p.bandwidth_hz, signal / (total(interferers) + ch.noise()));
    const double arrival = effective_arrival(lambda, pt, p.max_transmissions, p.arrivals);
    const double delay = rate > 0.0 ? md1_delay({arrival, rate}) : infinite_delay;
    return {bounded_payoff(rate, delay, p.delta), arrival};
}

direct_link
lone_mue_link(const game_model& g, const emitter_map& em, int m)
{
    const auto& u = g.topology().mues[m];
    auto interferers = em.at(mbs_node, u.subchannel, -1, {m});
    for (double w : em.native_at_mbs(u.subchannel))
        interferers.push_back(w);
    return direct_payoff(g,
                         mue_node(m),
                         mbs_node,
                         g.mue_power(m),
                         interferers,
                         g.config().gamma_mue(),
                         u.arrival_rate);
}

payoff
lone_mue_payoff(const game_model& g, const emitter_map& em, int m)
{
    return lone_mue_link(g, em, m).x;
}

payoff
guest_payoff(const game_model& g, const emitter_map& em, const guest& gs)
{
    const auto& u = g.topology().mues[gs.mue];
    return direct_payoff(g,
                         mue_node(gs.mue),
                         fap_node(gs.fap),
                         g.mue_power(gs.mue),
                         em.at(fap_node(gs.fap), gs.subchannel, -1, {gs.mue}),
                         g.config().gamma_mue(),
                         u.arrival_rate)
        .x;
}

payoff
lone_fue_payoff(const game_model& g, const emitter_map& em, int l)
{
    const auto& u = g.topology().fues[l];
    return direct_payoff(g,
                         fue_node(l),
                         fap_node(u.fap_id),
                         g.fue_power(l),
                         em.at(fap_node(u.fap_id), u.subchannel, l, {}),
                         g.config().gamma_fue(),
                         u.arrival_rate)
        .x;
}

} // namespace

game_model::game_model(const network_topology& topo,
                       const channel_model& channel,
                       const scenario_config& cfg,
                       bool interference)
    : topo_(&topo),
      channel_(&channel),
      cfg_(cfg),
      params_(model_params::from(cfg)),
      interference_(interference)
{
    const double p_max = cfg.p_max_w();
    const double target = dbm_to_w(cfg.compensation_target_dbm);
    for (const auto& m : topo.mues)
    {
        double p = m.tx_power;
        if (cfg.path_loss_compensation)
            p = std::min(p_max, target / gain(mue_node(m.id), mbs_node));
        mue_power_.push_back(p);
    }
    for (const auto& u : topo.fues)
    {
        double p = u.max_power;
        if (cfg.path_loss_compensation)
            p = std::min(p_max, target / gain(fue_node(u.id), fap_node(u.fap_id)));
        fue_power_.push_back(p);
    }

    const auto alone = partition::singletons(n_mues(), n_fues());
    const emitter_map em(*this, alone);
    noncoop_.resize(n_players());
    mue_arrival_.resize(n_mues());
    for (int m = 0; m < n_mues(); ++m)
    {
        const auto link = lone_mue_link(*this, em, m);
        noncoop_[m] = link.x;
        mue_arrival_[m] = link.arrival;
    }
    for (int l = 0; l < n_fues(); ++l)
        noncoop_[fue_player(l)] = lone_fue_payoff(*this, em, l);
}

double
game_model::gain(node_ref a, node_ref b) const
{
    return channel_->mean_gain(a, b);
}

bool
game_model::in_d2d_range(int m, int l) const
{
    return distance(topo_->mues[m].pos, topo_->fues[l].pos) <= cfg_.d2d_range;
}

double
game_model::d2d_power(int m, int l) const
{
    const double need =
        db_to_linear(cfg_.d2d_target_snr_db) * channel_->noise() / gain(mue_node(m), fue_node(l));
    return std::min(cfg_.p_max_w(), need);
}

double
game_model::d2d_rate(int m, int l) const
{
    const double snr = d2d_power(m, l) * gain(mue_node(m), fue_node(l)) / channel_->noise();
    return shannon_rate(params_.bandwidth_hz, snr);
}

emitter_map::emitter_map(const game_model& g, const partition& part, const std::vector<guest>& guests)
    : g_(&g),
      native_active_(g.n_fues(), true)
{
    const auto& topo = g.topology();
    std::vector<int> guest_of(g.n_mues(), -1);
    for (std::size_t i = 0; i < guests.size(); ++i)
        guest_of[guests[i].mue] = static_cast<int>(i);

    for (const auto& c : part.coalitions)
    {
        if (c.relay_fue < 0)
        {
            for (int m : c.mue_ids)
            {
                if (guest_of[m] >= 0)
                {
                    const auto& gs = guests[guest_of[m]];
                    macro_[gs.subchannel].push_back({mue_node(m), g.mue_power(m), -1, m});
                }
                else
                    macro_[topo.mues[m].subchannel].push_back({mue_node(m), g.mue_power(m), -1, m});
            }
            continue;
        }
        const int l = c.relay_fue;
        for (std::size_t i = 0; i < c.mue_ids.size(); ++i)
        {
            const int m = c.mue_ids[i];
            const int k = topo.mues[m].subchannel;
            const auto& t = c.lease.at(i);
            macro_[k].push_back({mue_node(m), (1.0 - t.alpha) * g.d2d_power(m, l), l, m});
            macro_[k].push_back(
                {fue_node(l), t.alpha * (t.beta * t.relay_power + (1.0 - t.beta) * t.own_power), l, m});
            if (k == topo.fues[l].subchannel)
                native_active_[l] = false;
        }
    }
    for (const auto& u : topo.fues)
        if (native_active_[u.id])
            native_[u.subchannel].push_back(u.id);
}

std::vector<double>
emitter_map::at(node_ref rx, int subchannel, int skip_owner, const std::vector<int>& skip_mues) const
{
    std::vector<double> out;
    if (!g_->interference())
        return out;
    auto it = macro_.find(subchannel);
    if (it == macro_.end())
        return out;
    for (const auto& e : it->second)
    {
        if (skip_owner >= 0 && e.owner == skip_owner)
            continue;
        if (std::find(skip_mues.begin(), skip_mues.end(), e.mue) != skip_mues.end())
            continue;
        if (e.power <= 0.0)
            continue;
        out.push_back(e.power * g_->gain(e.node, rx));
    }
    return out;
}

std::vector<double>
emitter_map::native_at_mbs(int subchannel) const
{
    std::vector<double> out;
    if (!g_->interference())
        return out;
    auto it = native_.find(subchannel);
    if (it == native_.end())
        return out;
    for (int l : it->second)
        out.push_back(g_->fue_power(l) * g_->gain(fue_node(l), mbs_node));
    return out;
}

coalition_inputs
make_coalition_inputs(const game_model& g,
                      const emitter_map& em,
                      int l,
                      const std::vector<int>& members,
                      const std::vector<lease_terms>& terms)
{
    const auto& topo = g.topology();
    const auto& u = topo.fues[l];
    const node_ref fap = fap_node(u.fap_id);
    const double noise = g.channel().noise();
    const double link = g.gain(fue_node(l), fap);

    coalition_inputs in;
    in.fue_lambda = u.arrival_rate;
    const auto native_i = em.at(fap, u.subchannel, l, members);
    const double signal = g.fue_power(l) * link;
    in.fue_pt = success_probability(signal,
                                    native_i,
                                    g.config().gamma_fue(),
                                    g.channel().params(),
                                    link_seed(topo.seed, fue_node(l), fap));
    const bool native_active = std::none_of(members.begin(), members.end(), [&](int m) {
        return topo.mues[m].subchannel == u.subchannel;
    });
    in.native_rate = native_active
                         ? shannon_rate(g.params().bandwidth_hz, signal / (total(native_i) + noise))
                         : 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
    {
        const int m = members[i];
        member_inputs mi;
        mi.arrival = g.mue_arrival(m);
        mi.relay_rate = g.d2d_rate(m, l);
        mi.q = link / (total(em.at(fap, topo.mues[m].subchannel, l, members)) + noise);
        if (i < terms.size())
            mi.terms = terms[i];
        in.members.push_back(mi);
    }
    return in;
}

void
check_partition(const game_model& g, const partition& part)
{
    std::vector<int> seen(g.n_players(), 0);
    for (const auto& c : part.coalitions)
    {
        if (c.relay_fue < 0 && c.mue_ids.size() != 1)
            throw structural_error("a coalition without a relay FUE must be a lone MUE");
        if (c.relay_fue >= g.n_fues())
            throw structural_error("unknown FUE " + std::to_string(c.relay_fue));
        if (c.relay_fue >= 0)
        {
            ++seen[g.fue_player(c.relay_fue)];
            if (c.lease.size() != c.mue_ids.size())
                throw structural_error("every serviced MUE needs lease terms");
        }
        for (int m : c.mue_ids)
        {
            if (m < 0 || m >= g.n_mues())
                throw structural_error("unknown MUE " + std::to_string(m));
            ++seen[g.mue_player(m)];
        }
    }
    for (int p = 0; p < g.n_players(); ++p)
        if (seen[p] != 1)
            throw structural_error("player " + std::to_string(p) + " appears " +
                                   std::to_string(seen[p]) + " times");
}

outcome
evaluate_partition(const game_model& g, const partition& part, const std::vector<guest>& guests)
{
    check_partition(g, part);
    const emitter_map em(g, part, guests);
    outcome out;
    out.part = part;
    out.payoffs.resize(g.n_players());
    std::vector<int> guest_of(g.n_mues(), -1);
    for (std::size_t i = 0; i < guests.size(); ++i)
        guest_of[guests[i].mue] = static_cast<int>(i);

    for (const auto& c : part.coalitions)
    {
        if (!c.cooperative())
        {
            if (c.relay_fue >= 0)
                out.payoffs[g.fue_player(c.relay_fue)] = lone_fue_payoff(g, em, c.relay_fue);
            for (int m : c.mue_ids)
                out.payoffs[g.mue_player(m)] = guest_of[m] >= 0
                                                   ? guest_payoff(g, em, guests[guest_of[m]])
                                                   : lone_mue_payoff(g, em, m);
            continue;
        }
        const auto in = make_coalition_inputs(g, em, c.relay_fue, c.mue_ids, c.lease);
        const auto res = evaluate_coalition(in, g.params());
        out.payoffs[g.fue_player(c.relay_fue)] = res.fue;
        for (std::size_t i = 0; i < c.mue_ids.size(); ++i)
            out.payoffs[g.mue_player(c.mue_ids[i])] = res.mues[i];
    }
    return out;
}

std::vector<double>
payoff_values(const outcome& o)
{
    std::vector<double> v;
    v.reserve(o.payoffs.size());
    for (const auto& p : o.payoffs)
        v.push_back(p.value);
    return v;
}

discovery
interferer_discovery(const game_model& g)
{
    discovery d;
    d.fue_candidates.resize(g.n_fues());
    d.mue_candidates.resize(g.n_mues());
    const auto& topo = g.topology();
    for (int l = 0; l < g.n_fues(); ++l)
    {
        for (int m = 0; m < g.n_mues(); ++m)
        {
            if (!g.in_d2d_range(m, l))
                continue;
            const double gm = g.gain(mue_node(m), fue_node(l));
            const bool co = topo.mues[m].subchannel == topo.fues[l].subchannel;
            d.fue_candidates[l].push_back({m, gm * g.mue_power(m), co});
            d.mue_candidates[m].push_back({l, gm * g.fue_power(l), co});
        }
    }
    auto order = [](const discovery::candidate& a, const discovery::candidate& b) {
        if (a.rssi != b.rssi)
            return a.rssi > b.rssi;
        return a.id < b.id;
    };
    for (auto& v : d.fue_candidates)
        std::sort(v.begin(), v.end(), order);
    for (auto& v : d.mue_candidates)
        std::sort(v.begin(), v.end(), order);
    return d;
}

coalition_state::coalition_state(const game_model& g,
                                 const partition& part,
                                 std::shared_ptr<lease_cache> cache)
    : g_(&g),
      owner_(g.n_mues(), -1),
      coalition_of_fue_(g.n_fues(), -1),
      cache_(cache ? std::move(cache) : std::make_shared<lease_cache>())
{
    check_partition(g, part);
    members_.resize(g.n_fues());
    terms_.resize(g.n_fues());
    for (const auto& c : part.coalitions)
    {
        if (c.relay_fue < 0)
            continue;
        members_[c.relay_fue] = c.mue_ids;
        terms_[c.relay_fue] = c.lease;
        for (int m : c.mue_ids)
            owner_[m] = c.relay_fue;
    }
    refresh();
}

partition
coalition_state::build(int detach) const
{
    partition p;
    std::vector<bool> lone(g_->n_mues(), false);
    for (int l = 0; l < g_->n_fues(); ++l)
    {
        coalition c{l, {}, {}};
        for (std::size_t i = 0; i < members_[l].size(); ++i)
        {
            if (members_[l][i] == detach)
                continue;
            c.mue_ids.push_back(members_[l][i]);
            c.lease.push_back(terms_[l][i]);
        }
        p.coalitions.push_back(std::move(c));
    }
    for (int m = 0; m < g_->n_mues(); ++m)
        if (owner_[m] < 0 || m == detach)
            p.coalitions.push_back(coalition::lone_mue(m));
    return p;
}

void
coalition_state::refresh()
{
    part_ = build(-1);
    for (std::size_t i = 0; i < part_.coalitions.size(); ++i)
        if (part_.coalitions[i].relay_fue >= 0)
            coalition_of_fue_[part_.coalitions[i].relay_fue] = static_cast<int>(i);
    outcome_ = evaluate_partition(*g_, part_);
}

double
coalition_state::fue_revert_payoff(int l) const
{
    auto p = part_;
    auto& c = p.coalitions[coalition_of_fue_[l]];
    const auto freed = std::move(c.mue_ids);
    c.mue_ids.clear();
    c.lease.clear();
    for (int m : freed)
        p.coalitions.push_back(coalition::lone_mue(m));
    const emitter_map em(*g_, p);
    return lone_fue_payoff(*g_, em, l).value;
}

namespace {

struct hasher
{
    std::uint64_t h = 0xcbf29ce484222325ULL;

    void add(double v)
    {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = splitmix64(h ^ bits);
    }
    void add(int v) { h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
};

std::uint64_t
problem_key(int l, int m, const lease_problem& pr)
{
    hasher k;
    k.add(l);
    k.add(m);
    k.add(pr.base.fue_lambda);
    k.add(pr.base.fue_pt);
    k.add(pr.base.native_rate);
    for (const auto& mi : pr.base.members)
    {
        k.add(mi.arrival);
        k.add(mi.relay_rate);
        k.add(mi.q);
        k.add(mi.terms.alpha);
        k.add(mi.terms.beta);
        k.add(mi.terms.relay_power);
        k.add(mi.terms.own_power);
    }
    k.add(pr.joiner.arrival);
    k.add(pr.joiner.relay_rate);
    k.add(pr.joiner.q);
    k.add(pr.mue_ref);
    k.add(pr.fue_ref);
    return k.h;
}

} // namespace

std::optional<join_offer>
coalition_state::try_join(int l, int m)
{
    return try_join(l,
                    m,
                    std::max(g_->noncoop_payoff(g_->mue_player(m)).value,
                             outcome_.payoffs[g_->mue_player(m)].value),
                    outcome_.payoffs[g_->fue_player(l)].value);
}

std::optional<join_offer>
coalition_state::try_join(int l, int m, double mue_ref, double fue_ref)
{
    // nothing to relay
    if (owner_[m] == l || !g_->in_d2d_range(m, l) || !(g_->mue_arrival(m) > 0.0))
        return std::nullopt;
    if (static_cast<int>(members_[l].size()) + 2 > g_->config().max_coalition_size)
        return std::nullopt;

    const auto ctx = build(m);
    const emitter_map em(*g_, ctx);
    std::vector<int> ids = members_[l];
    std::vector<lease_terms> terms = terms_[l];
    ids.push_back(m);
    auto in = make_coalition_inputs(*g_, em, l, ids, terms);

    const auto& cfg = g_->config();
    lease_problem pr;
    pr.joiner = in.members.back();
    in.members.pop_back();
    pr.base = std::move(in);
    pr.params = g_->params();
    pr.mue_ref = mue_ref;
    pr.fue_ref = fue_ref;
    pr.alpha_step = cfg.alpha_step;
    pr.beta_step = cfg.beta_step;
    pr.power_points = cfg.power_points;
    pr.objective = cfg.objective;

    const auto key = problem_key(l, m, pr);
    lease_result r;
    if (auto it = cache_->find(key); it != cache_->end())
        r = it->second;
    else
    {
        r = negotiate_alpha(pr);
        cache_->emplace(key, r);
    }
    if (!r.feasible)
        return std::nullopt;
    return join_offer{l, m, r};
}

void
coalition_state::apply_join(const join_offer& offer)
{
    if (owner_[offer.mue] >= 0)
    {
        auto& ids = members_[owner_[offer.mue]];
        auto& terms = terms_[owner_[offer.mue]];
        const auto pos = std::find(ids.begin(), ids.end(), offer.mue) - ids.begin();
        ids.erase(ids.begin() + pos);
        terms.erase(terms.begin() + pos);
    }
    members_[offer.fue].push_back(offer.mue);
    terms_[offer.fue].push_back(offer.lease.terms);
    owner_[offer.mue] = offer.fue;
    refresh();
}

void
coalition_state::remove_mue(int m)
{
    const int l = owner_[m];
    if (l < 0)
        return;
    auto& ids = members_[l];
    const auto pos = std::find(ids.begin(), ids.end(), m) - ids.begin();
    ids.erase(ids.begin() + pos);
    terms_[l].erase(terms_[l].begin() + pos);
    owner_[m] = -1;
    refresh();
}

void
coalition_state::dissolve(int l)
{
    for (int m : members_[l])
        owner_[m] = -1;
    members_[l].clear();
    terms_[l].clear();
    refresh();
}

namespace {

// How often each MUE has left each FUE during formation. Past the limit
// the MUE does not go back, which breaks join/leave cycles.
struct history
{
    int limit;
    std::vector<std::map<int, int>> left;
};

bool
visited(const history* h, int m, int l)
{
    if (!h)
        return false;
    const auto it = h->left[m].find(l);
    return it != h->left[m].end() && it->second >= h->limit;
}

void
record(history* h, int m, int l)
{
    if (h && l >= 0)
        ++h->left[m][l];
}

// Departures that strictly pay off for the leaver, in FUE id order.
bool
exit_step(const game_model& g, coalition_state& st, stability_report* report, history* h)
{
    bool changed = false;
    for (int l = 0; l < g.n_fues(); ++l)
    {
        const auto members = st.members(l);
        for (int m : members)
        {
            const double now = st.evaluated().payoffs[g.mue_player(m)].value;
            if (g.noncoop_payoff(g.mue_player(m)).value > now)
            {
                if (report)
                {
                    *report = {false, "mue_exit", m, l};
                    return true;
                }
                record(h, m, l);
                st.remove_mue(m);
                changed = true;
            }
        }
        if (st.members(l).empty())
            continue;
        if (st.fue_revert_payoff(l) > st.evaluated().payoffs[g.fue_player(l)].value)
        {
            if (report)
            {
                *report = {false, "fue_exit", -1, l};
                return true;
            }
            for (int m : st.members(l))
                record(h, m, l);
            st.dissolve(l);
            changed = true;
        }
    }
    return changed;
}

bool
join_step(const game_model& g,
          coalition_state& st,
          const discovery& d,
          stability_report* report,
          history* h)
{
    bool changed = false;
    for (int l = 0; l < g.n_fues(); ++l)
    {
        for (const auto& c : d.fue_candidates[l])
        {
            if (st.owner_of(c.id) == l || visited(h, c.id, l))
                continue;
            if (static_cast<int>(st.members(l).size()) + 2 > g.config().max_coalition_size)
                break;
            if (auto offer = st.try_join(l, c.id))
            {
                if (report)
                {
                    *report = {false, "join", c.id, l};
                    return true;
                }
                record(h, c.id, st.owner_of(c.id));
                st.apply_join(*offer);
                changed = true;
            }
        }
    }
    return changed;
}

bool
mutual_step(const game_model& g, coalition_state& st, const discovery& d, const history* h)
{
    bool changed = false;
    for (int l = 0; l < g.n_fues(); ++l)
    {
        if (!st.members(l).empty())
            continue;
        std::optional<join_offer> pick;
        for (const auto& c : d.fue_candidates[l])
        {
            if (st.owner_of(c.id) >= 0 || visited(h, c.id, l))
                continue;
            if ((pick = st.try_join(l, c.id)))
                break;
        }
        if (!pick)
            continue;
        const int m = pick->mue;
        int best = -1;
        for (const auto& c : d.mue_candidates[m])
        {
            if (!st.members(c.id).empty() || visited(h, m, c.id))
                continue;
            if (st.try_join(c.id, m))
            {
                best = c.id;
                break;
            }
        }
        if (best == l)
        {
            st.apply_join(*pick);
            changed = true;
        }
    }
    return changed;
}

// An FUE and an MUE pair up afresh, the FUE releasing its current members
// and the MUE leaving its coalition, when both strictly gain.
bool
pair_step(const game_model& g,
          coalition_state& st,
          const discovery& d,
          stability_report* report,
          history* h)
{
    bool changed = false;
    for (int l = 0; l < g.n_fues(); ++l)
    {
        if (st.members(l).empty())
            continue;
        for (const auto& c : d.fue_candidates[l])
        {
            const int m = c.id;
            if (visited(h, m, l) || (st.owner_of(m) == l && st.members(l).size() == 1))
                continue;
            const double x_m = st.evaluated().payoffs[g.mue_player(m)].value;
            const double x_l = st.evaluated().payoffs[g.fue_player(l)].value;
            coalition_state next = st;
            const int from = next.owner_of(m);
            const auto released = next.members(l);
            next.remove_mue(m);
            next.dissolve(l);
            const auto offer = next.try_join(l, m, x_m, x_l);
            if (!offer)
                continue;
            if (report)
            {
                *report = {false, "pair", m, l};
                return true;
            }
            next.apply_join(*offer);
            record(h, m, from);
            for (int r : released)
                if (r != m)
                    record(h, r, l);
            st = std::move(next);
            changed = true;
            if (st.members(l).size() != 1)
                break;
        }
    }
    return changed;
}

} // namespace

formation_result
form_coalitions(const game_model& g)
{
    coalition_state st(g, partition::singletons(g.n_mues(), g.n_fues()));
    const auto d = interferer_discovery(g);
    const int cap = std::max(1, g.n_players() * g.config().max_coalition_size);
    formation_result out;
    history h{g.config().revisit_limit, std::vector<std::map<int, int>>(g.n_mues())};
    for (int sweep = 1; sweep <= cap; ++sweep)
    {
        out.iterations = sweep;
        bool changed = exit_step(g, st, nullptr, &h);
        changed = mutual_step(g, st, d, &h) || changed;
        changed = join_step(g, st, d, nullptr, &h) || changed;
        changed = pair_step(g, st, d, nullptr, &h) || changed;
        if (!changed)
        {
            out.converged = true;
            break;
        }
    }
    out.result = st.evaluated();
    return out;
}

stability_report
is_stable(const game_model& g, const partition& part)
{
    coalition_state st(g, part);
    stability_report report;
    if (exit_step(g, st, &report, nullptr))
        return report;
    const auto d = interferer_discovery(g);
    if (join_step(g, st, d, &report, nullptr))
        return report;
    if (pair_step(g, st, d, &report, nullptr))
        return report;
    return {};
}

void
write_partition_csv(std::ostream& os, const partition& part)
{
    os << "coalition_id,fue_id,mue_ids,alpha,beta\n";
    int id = 0;
    for (const auto& c : part.coalitions)
    {
        if (!c.cooperative())
            continue;
        os << id++ << ',' << c.relay_fue << ',';
        auto list = [&](auto get) {
            for (std::size_t i = 0; i < c.mue_ids.size(); ++i)
                os << (i ? ";" : "") << get(i);
        };
        list([&](std::size_t i) { return c.mue_ids[i]; });
        os << ',';
        list([&](std::size_t i) { return c.lease[i].alpha; });
        os << ',';
        list([&](std::size_t i) { return c.lease[i].beta; });
        os << '\n';
    }
}

} // namespace femtocoop
