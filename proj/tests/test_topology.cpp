/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/config.hpp"
#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"
#include "femtocoop/topology.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace femtocoop;
using femtocoop::testing::add_fap;

namespace {

scenario_config
layout(int n, int m)
{
    scenario_config c;
    c.n_faps = n;
    c.n_mues = m;
    return c;
}

// Brute-force check that the FAP conflict graph has a proper colouring
// with `k` colours.
bool
colourable(const network_topology& t, int k)
{
    const int n = static_cast<int>(t.faps.size());
    std::vector<int> c(n, 0);
    for (;;)
    {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                if (within_sensing_range(t, t.faps[i], t.faps[j]) && c[i] == c[j])
                    ok = false;
        if (ok)
            return true;
        int i = 0;
        while (i < n && ++c[i] == k)
            c[i++] = 0;
        if (i == n)
            return false;
    }
}

} // namespace

TEST_CASE("degenerate layout")
{
    const auto t = generate_topology(layout(1, 0), 3);
    CHECK(t.faps.size() == 1);
    CHECK(t.fues.size() == 1);
    CHECK(t.mues.empty());
}

TEST_CASE("regeneration is bit-identical")
{
    const auto a = generate_topology(layout(200, 200), 99);
    const auto b = generate_topology(layout(200, 200), 99);
    CHECK(structural_hash(a) == structural_hash(b));
    std::ostringstream sa, sb;
    write_topology_csv(sa, a);
    write_topology_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(structural_hash(a) != structural_hash(generate_topology(layout(200, 200), 100)));
}

TEST_CASE("placement bounds and subchannel disjointness")
{
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto cfg = layout(200, 200);
        const auto t = generate_topology(cfg, s);
        CHECK_NOTHROW(validate(t, cfg));
        for (const auto& m : t.mues)
        {
            CHECK(m.pos.norm() >= 50.0);
            CHECK(m.pos.norm() <= 1000.0);
        }
        for (const auto& u : t.fues)
        {
            const auto& f = t.faps[u.fap_id];
            const double d = distance(u.pos, f.pos);
            CHECK(d > 0.2);
            CHECK(d <= f.radius);
            CHECK(std::find(f.subchannels.begin(), f.subchannels.end(), u.subchannel) != f.subchannels.end());
        }
        std::set<int> mue_channels;
        for (const auto& m : t.mues)
            mue_channels.insert(m.subchannel);
        CHECK(mue_channels.size() == t.mues.size());
        for (const auto& a : t.faps)
            for (const auto& b : t.faps)
            {
                if (a.id >= b.id || !within_sensing_range(t, a, b))
                    continue;
                for (int k : a.subchannels)
                    CHECK(std::find(b.subchannels.begin(), b.subchannels.end(), k) == b.subchannels.end());
            }
    }
}

TEST_CASE("mean MUE distance from the MBS")
{
    // uniform on the annulus [50, 1000]: 2/3 (R^3 - r^3) / (R^2 - r^2)
    const double expected = 2.0 / 3.0 * (1e9 - 125000.0) / (1e6 - 2500.0);
    double sum = 0.0;
    long n = 0;
    for (std::uint64_t s = 0; s < 2000; ++s)
        for (const auto& m : generate_topology(layout(1, 200), s).mues)
        {
            sum += m.pos.norm();
            ++n;
        }
    CHECK(sum / n == doctest::Approx(expected).epsilon(0.005));
}

TEST_CASE("nearby FAPs get disjoint subchannels, distant ones may reuse")
{
    network_topology t;
    t.n_subchannels = 1;
    add_fap(t, {0.0, 0.0}, {0});
    add_fap(t, {2000.0, 0.0}, {0});
    rng_stream rng(1);
    CHECK_NOTHROW(assign_fap_subchannels(t, rng));
    CHECK(t.faps[0].subchannels == t.faps[1].subchannels);

    network_topology u;
    u.n_subchannels = 4;
    add_fap(u, {0.0, 0.0}, {0});
    add_fap(u, {5.0, 0.0}, {0});
    for (std::uint64_t s = 0; s < 50; ++s)
    {
        rng_stream r(s);
        assign_fap_subchannels(u, r);
        CHECK(u.faps[0].subchannels[0] != u.faps[1].subchannels[0]);
    }
}

TEST_CASE("three mutually conflicting FAPs with two subchannels")
{
    network_topology t;
    t.n_subchannels = 2;
    add_fap(t, {0.0, 0.0}, {0});
    add_fap(t, {30.0, 0.0}, {0});
    add_fap(t, {15.0, 25.0}, {0});
    CHECK_FALSE(colourable(t, 2));
    CHECK(colourable(t, 3));
    rng_stream rng(5);
    CHECK_THROWS_AS(assign_subchannels(t, rng), infeasible_assignment);
    t.n_subchannels = 3;
    CHECK_NOTHROW(assign_subchannels(t, rng));
}

TEST_CASE("co-channel index")
{
    CHECK(cochannel_sets(network_topology{}).empty());

    const auto t = generate_topology(layout(50, 100), 8);
    const auto map = cochannel_sets(t);
    std::multiset<int> mues, fues;
    for (const auto& [k, e] : map)
    {
        for (int m : e.mue_ids)
        {
            mues.insert(m);
            CHECK(t.mues[m].subchannel == k);
        }
        for (int l : e.fue_ids)
        {
            fues.insert(l);
            CHECK(t.fues[l].subchannel == k);
        }
    }
    CHECK(mues.size() == t.mues.size());
    CHECK(std::set<int>(mues.begin(), mues.end()).size() == t.mues.size());
    CHECK(fues.size() == t.fues.size());
    CHECK(std::set<int>(fues.begin(), fues.end()).size() == t.fues.size());
}

TEST_CASE("pool smaller than the MUE count is rejected")
{
    auto cfg = layout(1, 10);
    cfg.n_subchannels = 5;
    CHECK_THROWS_AS(validate(cfg), config_error);
}

TEST_CASE("topology CSV layout")
{
    const auto t = generate_topology(layout(2, 2), 4);
    std::ostringstream os;
    write_topology_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "id,kind,x,y,subchannel,fap_id");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 1 + 2 + 2 + 2);
}
