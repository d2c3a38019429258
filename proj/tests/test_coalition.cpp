/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/coalition.hpp"
#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace femtocoop;
using femtocoop::testing::add_fap;
using femtocoop::testing::add_mue;
using femtocoop::testing::game_fixture;

namespace {

// FUE at (803, 0) and a co-channel MUE 15 m away; both gain by pairing.
std::unique_ptr<game_fixture>
pair_instance()
{
    auto fx = std::make_unique<game_fixture>();
    fx->cfg.channel.shadow_sigma_db = 0.0;
    add_fap(fx->topo, {800.0, 0.0}, {0});
    add_mue(fx->topo, {803.0, 15.0}, 0);
    fx->build();
    return fx;
}

std::unique_ptr<game_fixture>
random_instance(int n, int m, std::uint64_t seed)
{
    auto fx = std::make_unique<game_fixture>();
    fx->cfg.n_faps = n;
    fx->cfg.n_mues = m;
    fx->topo = generate_topology(fx->cfg, seed);
    fx->build(derive_seed(seed, 0, stream_tag::shadowing));
    return fx;
}

} // namespace

TEST_CASE("singleton partition pays the non-cooperative payoffs")
{
    auto fx = random_instance(20, 20, 3);
    const auto& g = *fx->g;
    const auto o = evaluate_partition(g, partition::singletons(g.n_mues(), g.n_fues()));
    for (int p = 0; p < g.n_players(); ++p)
        CHECK(o.payoffs[p].value == g.noncoop_payoff(p).value);
}

TEST_CASE("a pair lowers the MUE's interference at outside receivers")
{
    game_fixture fx;
    fx.cfg.channel.shadow_sigma_db = 0.0;
    add_fap(fx.topo, {800.0, 0.0}, {0});
    add_fap(fx.topo, {800.0, 150.0}, {7});
    add_mue(fx.topo, {803.0, 15.0}, 7);
    fx.build();
    const auto& g = *fx.g;

    const auto f = form_coalitions(g);
    REQUIRE(f.result.part.coalitions.size() == 2);
    const auto& c = *std::find_if(f.result.part.coalitions.begin(), f.result.part.coalitions.end(),
                                  [](const coalition& c) { return c.cooperative(); });
    CHECK(c.relay_fue == 0);
    CHECK(c.mue_ids == std::vector<int>{0});
    // FUE 1 shares the MUE's subchannel and stays alone
    CHECK(f.result.payoffs[g.fue_player(1)].value > g.noncoop_payoff(g.fue_player(1)).value);
}

TEST_CASE("relabelling players permutes payoffs")
{
    auto fx = random_instance(6, 6, 11);
    fx->cfg.channel.shadow_sigma_db = 0.0;
    fx->build();
    const auto f = form_coalitions(*fx->g);

    game_fixture rev;
    rev.cfg = fx->cfg;
    rev.topo = fx->topo;
    const int m = static_cast<int>(rev.topo.mues.size());
    std::reverse(rev.topo.mues.begin(), rev.topo.mues.end());
    for (int i = 0; i < m; ++i)
        rev.topo.mues[i].id = i;
    rev.build();

    partition p = f.result.part;
    for (auto& c : p.coalitions)
        for (auto& id : c.mue_ids)
            id = m - 1 - id;
    const auto o = evaluate_partition(*rev.g, p);
    for (int i = 0; i < m; ++i)
        CHECK(o.payoffs[i].value == doctest::Approx(f.result.payoffs[m - 1 - i].value).epsilon(1e-12));
    for (int l = 0; l < fx->g->n_fues(); ++l)
        CHECK(o.payoffs[m + l].value == doctest::Approx(f.result.payoffs[m + l].value).epsilon(1e-12));
}

TEST_CASE("partition shape checks")
{
    auto fx = pair_instance();
    const auto& g = *fx->g;
    partition missing{{coalition::lone_fue(0)}};
    CHECK_THROWS_AS(check_partition(g, missing), structural_error);
    partition twice{{coalition::lone_fue(0), coalition::lone_mue(0), coalition::lone_mue(0)}};
    CHECK_THROWS_AS(check_partition(g, twice), structural_error);
    partition no_relay{{coalition{-1, {0, 0}, {}}, coalition::lone_fue(0)}};
    CHECK_THROWS_AS(check_partition(g, no_relay), structural_error);
    CHECK_NOTHROW(check_partition(g, partition::singletons(1, 1)));
}

TEST_CASE("discovery order")
{
    SUBCASE("nobody in range")
    {
        game_fixture fx;
        add_fap(fx.topo, {800.0, 0.0}, {0});
        add_mue(fx.topo, {300.0, 0.0}, 0);
        fx.build();
        const auto d = interferer_discovery(*fx.g);
        CHECK(d.fue_candidates[0].empty());
        CHECK(d.mue_candidates[0].empty());
    }
    SUBCASE("stronger interferer first")
    {
        game_fixture fx;
        fx.cfg.channel.shadow_sigma_db = 0.0;
        add_fap(fx.topo, {800.0, 0.0}, {0});
        add_mue(fx.topo, {803.0, 30.0}, 1);
        add_mue(fx.topo, {803.0, 10.0}, 2);
        fx.build();
        const auto d = interferer_discovery(*fx.g);
        REQUIRE(d.fue_candidates[0].size() == 2);
        CHECK(d.fue_candidates[0][0].id == 1);
        CHECK(d.fue_candidates[0][1].id == 0);
    }
    SUBCASE("random instance matches a full sort")
    {
        auto fx = femtocoop::testing::cluster_instance(10, 20, 5);
        const auto& g = *fx->g;
        const auto d = interferer_discovery(g);
        for (int l = 0; l < g.n_fues(); ++l)
        {
            std::vector<std::pair<double, int>> all;
            for (int m = 0; m < g.n_mues(); ++m)
                if (distance(fx->topo.mues[m].pos, fx->topo.fues[l].pos) <= g.config().d2d_range)
                    all.emplace_back(-g.gain({node_kind::mue, m}, {node_kind::fue, l}) * g.mue_power(m), m);
            std::sort(all.begin(), all.end());
            REQUIRE(all.size() == d.fue_candidates[l].size());
            for (std::size_t i = 0; i < all.size(); ++i)
                CHECK(d.fue_candidates[l][i].id == all[i].second);
        }
    }
}

TEST_CASE("formation on hand-built instances")
{
    SUBCASE("everyone out of range")
    {
        game_fixture fx;
        add_fap(fx.topo, {800.0, 0.0}, {0});
        add_fap(fx.topo, {-800.0, 0.0}, {1});
        add_mue(fx.topo, {0.0, 500.0}, 2);
        fx.build();
        const auto f = form_coalitions(*fx.g);
        CHECK(f.iterations == 1);
        CHECK(f.converged);
        CHECK(f.result.part.coalitions.size() == 3);
        CHECK(is_stable(*fx.g, f.result.part).stable);
    }
    SUBCASE("profitable pair forms")
    {
        auto fx = pair_instance();
        const auto& g = *fx->g;
        // two-partition enumeration: singletons vs the pair
        coalition_state st(g, partition::singletons(1, 1));
        const auto offer = st.try_join(0, 0);
        REQUIRE(offer);
        st.apply_join(*offer);
        const auto pair = payoff_values(st.evaluated());
        CHECK(pair[0] > g.noncoop_payoff(0).value);
        CHECK(pair[1] > g.noncoop_payoff(1).value);

        const auto f = form_coalitions(g);
        CHECK(f.result.part.coalitions.size() == 1);
        CHECK(payoff_values(f.result) == pair);

        const auto cert = is_stable(g, partition::singletons(1, 1));
        CHECK_FALSE(cert.stable);
        CHECK(cert.mue == 0);
        CHECK(cert.fue == 0);
        CHECK(is_stable(g, f.result.part).stable);
    }
}

TEST_CASE("an MUE with no traffic never joins")
{
    // another member's traffic would give the idle MUE a nonzero relay delay
    game_fixture fx;
    fx.cfg.channel.shadow_sigma_db = 0.0;
    add_fap(fx.topo, {800.0, 0.0}, {0});
    add_mue(fx.topo, {803.0, 15.0}, 0);
    add_mue(fx.topo, {803.0, -15.0}, 1);
    fx.topo.mues[1].arrival_rate = 0.0;
    fx.build();
    coalition_state st(*fx.g, partition::singletons(2, 1));
    const auto first = st.try_join(0, 0);
    REQUIRE(first);
    st.apply_join(*first);
    CHECK_FALSE(st.try_join(0, 1));
    for (const auto& c : form_coalitions(*fx.g).result.part.coalitions)
    {
        const bool relays_idle = c.cooperative() && std::count(c.mue_ids.begin(), c.mue_ids.end(), 1) > 0;
        CHECK_FALSE(relays_idle);
    }
}

TEST_CASE("formation invariants over random rounds")
{
    for (std::uint64_t s = 0; s < 40; ++s)
    {
        auto fx = random_instance(20, 20, derive_seed(77, s, stream_tag::round));
        const auto& g = *fx->g;
        const auto f = form_coalitions(g);
        CHECK(f.converged);
        CHECK(f.iterations <= g.n_players() * g.config().max_coalition_size);
        CHECK(is_stable(g, f.result.part).stable);

        const emitter_map em(g, f.result.part);
        for (const auto& c : f.result.part.coalitions)
        {
            if (!c.cooperative())
                continue;
            CHECK(c.size() <= g.config().max_coalition_size);
            const auto in = make_coalition_inputs(g, em, c.relay_fue, c.mue_ids, c.lease);
            const auto ev = evaluate_coalition(in, g.params());
            CHECK(ev.relayed_arrival < ev.relay_service);
            for (std::size_t i = 0; i < c.mue_ids.size(); ++i)
            {
                CHECK(in.members[i].arrival < in.members[i].relay_rate);
                CHECK(satisfies_power_budget(c.lease[i], g.params().p_max));
                CHECK(c.lease[i].alpha > 0.0);
                const int p = g.mue_player(c.mue_ids[i]);
                CHECK(f.result.payoffs[p].value > g.noncoop_payoff(p).value);
            }
            const int p = g.fue_player(c.relay_fue);
            CHECK(f.result.payoffs[p].value > g.noncoop_payoff(p).value);
        }
    }
}

TEST_CASE("dominance relation")
{
    const std::vector<int> s{0, 2};
    const std::vector<double> x{1, 5, 2}, y{1, 0, 3}, z{1, 9, 4};
    CHECK_FALSE(dominates(x, x, s));
    CHECK(dominates(y, x, s));
    CHECK_FALSE(dominates(x, y, s));
    CHECK(dominates(z, y, s));
    CHECK(dominates(z, x, s));

    rng_stream rng(12);
    for (int i = 0; i < 500; ++i)
    {
        std::vector<double> a(3), b(3), c(3);
        for (int k = 0; k < 3; ++k)
        {
            a[k] = static_cast<double>(rng.below(3));
            b[k] = static_cast<double>(rng.below(3));
            c[k] = static_cast<double>(rng.below(3));
        }
        const std::vector<int> all{0, 1, 2};
        CHECK_FALSE(dominates(a, a, all));
        if (dominates(a, b, all) && dominates(b, c, all))
            CHECK(dominates(a, c, all));
    }
}

TEST_CASE("partition CSV")
{
    auto fx = pair_instance();
    const auto f = form_coalitions(*fx->g);
    std::ostringstream os;
    write_partition_csv(os, f.result.part);
    const auto text = os.str();
    CHECK(text.rfind("coalition_id,fue_id,mue_ids,alpha,beta\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
