/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_TESTS_SUPPORT_HPP
#define FEMTOCOOP_TESTS_SUPPORT_HPP

#include "femtocoop/coalition.hpp"
#include "femtocoop/config.hpp"
#include "femtocoop/rng.hpp"
#include "femtocoop/topology.hpp"

#include <memory>
#include <vector>

namespace femtocoop::testing {

// Owns everything a game_model points at, so it can be returned by pointer.
struct game_fixture
{
    scenario_config cfg;
    network_topology topo;
    std::unique_ptr<channel_model> ch;
    std::unique_ptr<game_model> g;

    void build(std::uint64_t shadow_seed = 7, bool interference = true)
    {
        ch = std::make_unique<channel_model>(topo, cfg.channel, shadow_seed);
        g = std::make_unique<game_model>(topo, *ch, cfg, interference);
    }
};

inline void
add_fap(network_topology& t, position p, std::vector<int> subchannels, position fue_offset = {3.0, 0.0})
{
    const int id = static_cast<int>(t.faps.size());
    fap f;
    f.id = id;
    f.pos = p;
    f.subchannels = std::move(subchannels);
    fue u;
    u.id = static_cast<int>(t.fues.size());
    u.fap_id = id;
    u.pos = {p.x + fue_offset.x, p.y + fue_offset.y};
    u.subchannel = f.subchannels.front();
    f.fue_ids.push_back(u.id);
    t.faps.push_back(f);
    t.fues.push_back(u);
}

inline void
add_mue(network_topology& t, position p, int subchannel)
{
    mue m;
    m.id = static_cast<int>(t.mues.size());
    m.pos = p;
    m.subchannel = subchannel;
    t.mues.push_back(m);
}

// Random clustered instance, the kind oracle-check draws.
inline std::unique_ptr<game_fixture>
cluster_instance(int n_faps, int n_mues, std::uint64_t seed)
{
    auto fx = std::make_unique<game_fixture>();
    fx->cfg.n_faps = n_faps;
    fx->cfg.n_mues = n_mues;
    fx->cfg.layout = layout_mode::cluster;
    fx->topo = generate_topology(fx->cfg, seed);
    fx->build(derive_seed(seed, 0, stream_tag::shadowing));
    return fx;
}

} // namespace femtocoop::testing

#endif
