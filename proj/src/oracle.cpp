/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>

namespace femtocoop {

namespace {

using mask = std::uint32_t;

bool
has(mask r, int p)
{
    return (r >> p) & 1U;
}

// Exact text key of the arrangement outside a residual game.
std::string
context_key(mask r, const partition& ctx)
{
    std::string k = std::to_string(r) + '/';
    char buf[64];
    for (const auto& c : ctx.coalitions)
    {
        if (!c.cooperative())
            continue;
        k += std::to_string(c.relay_fue) + ':';
        for (std::size_t i = 0; i < c.mue_ids.size(); ++i)
        {
            const auto& t = c.lease[i];
            std::snprintf(buf, sizeof buf, "%d(%a,%a,%a,%a)", c.mue_ids[i], t.alpha, t.beta, t.relay_power,
                          t.own_power);
            k += buf;
        }
        k += ';';
    }
    return k;
}

struct residual
{
    std::vector<outcome> omega;
    std::vector<int> core; // indices into omega

    std::vector<const outcome*> achievable() const
    {
        std::vector<const outcome*> out;
        if (core.empty())
            for (const auto& o : omega)
                out.push_back(&o);
        else
            for (int i : core)
                out.push_back(&omega[i]);
        return out;
    }
};

class core_search
{
  public:
    explicit core_search(const game_model& g)
        : g_(g),
          cache_(std::make_shared<lease_cache>()),
          d_(interferer_discovery(g))
    {
        for (int l = 0; l < g.n_fues(); ++l)
        {
            rank_.emplace_back(g.n_mues(), -1);
            for (std::size_t i = 0; i < d_.fue_candidates[l].size(); ++i)
                rank_[l][d_.fue_candidates[l][i].id] = static_cast<int>(i);
        }
    }

    const residual& solve(mask r, const partition& ctx)
    {
        const auto key = context_key(r, ctx);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        residual res = compute(r, ctx);
        return memo_.emplace(key, std::move(res)).first->second;
    }

    int states() const { return static_cast<int>(memo_.size()); }

  private:
    // Joins the MUEs assigned to each FUE, FUEs in id order, members in
    // discovery order. Empty if any join is refused.
    std::optional<coalition_state> realize(const partition& ctx, const std::vector<int>& fue_of) const
    {
        coalition_state st(g_, ctx, cache_);
        for (int l = 0; l < g_.n_fues(); ++l)
        {
            std::vector<int> ms;
            for (int m = 0; m < g_.n_mues(); ++m)
                if (fue_of[m] == l)
                {
                    if (rank_[l][m] < 0)
                        return std::nullopt;
                    ms.push_back(m);
                }
            std::sort(ms.begin(), ms.end(), [&](int a, int b) { return rank_[l][a] < rank_[l][b]; });
            for (int m : ms)
            {
                const auto offer = st.try_join(l, m);
                if (!offer)
                    return std::nullopt;
                st.apply_join(*offer);
            }
        }
        return st;
    }

    void enumerate(mask r,
                   const partition& ctx,
                   std::vector<int>& fue_of,
                   int m,
                   std::vector<outcome>& out) const
    {
        if (m == g_.n_mues())
        {
            if (auto st = realize(ctx, fue_of))
                out.push_back(st->evaluated());
            return;
        }
        if (!has(r, g_.mue_player(m)))
        {
            enumerate(r, ctx, fue_of, m + 1, out);
            return;
        }
        fue_of[m] = -1;
        enumerate(r, ctx, fue_of, m + 1, out);
        for (int l = 0; l < g_.n_fues(); ++l)
        {
            if (!has(r, g_.fue_player(l)) || rank_[l][m] < 0)
                continue;
            fue_of[m] = l;
            enumerate(r, ctx, fue_of, m + 1, out);
        }
        fue_of[m] = -1;
    }

    // Coalitions S within r the game admits: single players, or one FUE
    // with MUEs it can reach.
    std::vector<std::vector<int>> deviations(mask r) const
    {
        std::vector<std::vector<int>> out;
        for (int p = 0; p < g_.n_players(); ++p)
            if (has(r, p))
                out.push_back({p});
        for (int l = 0; l < g_.n_fues(); ++l)
        {
            if (!has(r, g_.fue_player(l)))
                continue;
            std::vector<int> reach;
            for (int m = 0; m < g_.n_mues(); ++m)
                if (has(r, g_.mue_player(m)) && rank_[l][m] >= 0)
                    reach.push_back(m);
            const int cap = g_.config().max_coalition_size - 1;
            for (mask sub = 1; sub < (1U << reach.size()); ++sub)
            {
                std::vector<int> s{g_.fue_player(l)};
                for (std::size_t i = 0; i < reach.size(); ++i)
                    if (has(sub, static_cast<int>(i)))
                        s.push_back(g_.mue_player(reach[i]));
                if (static_cast<int>(s.size()) - 1 <= cap)
                    out.push_back(std::move(s));
            }
        }
        return out;
    }

    residual compute(mask r, const partition& ctx)
    {
        residual res;
        std::vector<int> fue_of(g_.n_mues(), -1);
        enumerate(r, ctx, fue_of, 0, res.omega);

        std::vector<bool> dominated(res.omega.size(), false);
        for (const auto& s : deviations(r))
        {
            std::vector<int> assign(g_.n_mues(), -1);
            mask rest = r;
            for (int p : s)
                rest &= ~(mask{1} << p);
            if (s.size() > 1)
                for (std::size_t i = 1; i < s.size(); ++i)
                    assign[s[i]] = s[0] - g_.n_mues();
            const auto formed = realize(ctx, assign);
            if (!formed)
                continue;

            std::vector<std::vector<double>> ys;
            if (rest == 0)
                ys.push_back(payoff_values(formed->evaluated()));
            else
                for (const auto* o : solve(rest, formed->current()).achievable())
                    ys.push_back(payoff_values(*o));

            for (std::size_t i = 0; i < res.omega.size(); ++i)
            {
                if (dominated[i])
                    continue;
                const auto x = payoff_values(res.omega[i]);
                for (const auto& y : ys)
                    if (dominates(y, x, s))
                    {
                        dominated[i] = true;
                        break;
                    }
            }
        }
        for (std::size_t i = 0; i < res.omega.size(); ++i)
            if (!dominated[i])
                res.core.push_back(static_cast<int>(i));
        return res;
    }

    const game_model& g_;
    std::shared_ptr<lease_cache> cache_;
    discovery d_;
    std::vector<std::vector<int>> rank_; // discovery position of each MUE per FUE, -1 out of range
    std::map<std::string, residual> memo_;
};

std::vector<std::pair<int, std::vector<int>>>
groups(const partition& p)
{
    std::vector<std::pair<int, std::vector<int>>> out;
    for (const auto& c : p.coalitions)
    {
        if (!c.cooperative())
            continue;
        auto ids = c.mue_ids;
        std::sort(ids.begin(), ids.end());
        out.emplace_back(c.relay_fue, std::move(ids));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

core_result
recursive_core_oracle(const game_model& g, int max_players)
{
    if (g.n_players() > max_players)
        throw oracle_refused(std::to_string(g.n_players()) + " players exceed the oracle cap of " +
                             std::to_string(max_players));
    if (g.n_players() > 31)
        throw oracle_refused("player sets are limited to 31 members");
    core_search search(g);
    const mask all = g.n_players() == 0 ? 0 : (mask{1} << g.n_players()) - 1;
    const auto& top = search.solve(all, partition::singletons(g.n_mues(), g.n_fues()));
    core_result out;
    out.feasible = top.omega;
    for (int i : top.core)
        out.core.push_back(top.omega[i]);
    out.states = search.states();
    return out;
}

bool
same_structure(const partition& a, const partition& b)
{
    return groups(a) == groups(b);
}

core_match
match_core(const outcome& x, const core_result& core, double rel_tol)
{
    core_match best;
    best.shortfall = std::numeric_limits<double>::infinity();
    const auto xv = payoff_values(x);
    for (std::size_t k = 0; k < core.core.size(); ++k)
    {
        const auto cv = payoff_values(core.core[k]);
        bool close = cv.size() == xv.size();
        double gap = 0.0;
        for (std::size_t i = 0; i < cv.size() && i < xv.size(); ++i)
        {
            const double scale = std::max(std::abs(cv[i]), std::abs(xv[i]));
            if (std::abs(cv[i] - xv[i]) > rel_tol * scale)
                close = false;
            if (cv[i] > 0.0)
                gap += std::max(0.0, (cv[i] - xv[i]) / cv[i]);
        }
        gap /= std::max<std::size_t>(1, cv.size());
        const bool member = close || same_structure(x.part, core.core[k].part);
        if ((member && !best.member) || (member == best.member && gap < best.shortfall))
        {
            best.member = member;
            best.shortfall = gap;
            best.index = static_cast<int>(k);
        }
    }
    if (best.index < 0)
        best.shortfall = 0.0;
    return best;
}

stability_report
check_small_deviations(const game_model& g, const outcome& x)
{
    const auto xv = payoff_values(x);
    auto cache = std::make_shared<lease_cache>();
    for (int m = 0; m < g.n_mues(); ++m)
    {
        coalition_state st(g, x.part, cache);
        const int l = st.owner_of(m);
        if (l < 0)
            continue;
        st.remove_mue(m);
        if (st.evaluated().payoffs[g.mue_player(m)].value > xv[g.mue_player(m)])
            return {false, "mue_exit", m, l};
    }
    for (int l = 0; l < g.n_fues(); ++l)
    {
        coalition_state st(g, x.part, cache);
        if (st.members(l).empty())
            continue;
        st.dissolve(l);
        if (st.evaluated().payoffs[g.fue_player(l)].value > xv[g.fue_player(l)])
            return {false, "fue_exit", -1, l};
    }
    for (int l = 0; l < g.n_fues(); ++l)
    {
        for (int m = 0; m < g.n_mues(); ++m)
        {
            if (!g.in_d2d_range(m, l))
                continue;
            coalition_state st(g, x.part, cache);
            if (st.owner_of(m) == l && st.members(l).size() == 1)
                continue;
            st.remove_mue(m);
            st.dissolve(l);
            const auto offer = st.try_join(l, m, xv[g.mue_player(m)], xv[g.fue_player(l)]);
            if (!offer)
                continue;
            st.apply_join(*offer);
            if (dominates(payoff_values(st.evaluated()), xv, {g.mue_player(m), g.fue_player(l)}))
                return {false, "pair", m, l};
        }
    }
    return {};
}

void
write_core_json(std::ostream& os, const core_result& r)
{
    using nlohmann::json;
    auto encode = [](const outcome& o) {
        json cs = json::array();
        for (const auto& c : o.part.coalitions)
        {
            json j;
            j["fue"] = c.relay_fue;
            j["mues"] = c.mue_ids;
            json alpha = json::array(), beta = json::array();
            for (const auto& t : c.lease)
            {
                alpha.push_back(t.alpha);
                beta.push_back(t.beta);
            }
            j["alpha"] = alpha;
            j["beta"] = beta;
            cs.push_back(j);
        }
        return json{{"coalitions", cs}, {"payoffs", payoff_values(o)}};
    };
    json out;
    out["core"] = json::array();
    out["feasible"] = json::array();
    for (const auto& o : r.core)
        out["core"].push_back(encode(o));
    for (const auto& o : r.feasible)
        out["feasible"].push_back(encode(o));
    out["states"] = r.states;
    os << out.dump(2) << '\n';
}

} // namespace femtocoop
