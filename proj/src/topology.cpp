/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/topology.hpp"

#include "femtocoop/config.hpp"
#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>
#include <string>

namespace femtocoop {

position
network_topology::pos(node_ref n) const
{
    switch (n.kind)
    {
    case node_kind::mbs:
        return {};
    case node_kind::fap:
        return faps.at(n.index).pos;
    case node_kind::fue:
        return fues.at(n.index).pos;
    case node_kind::mue:
        return mues.at(n.index).pos;
    }
    return {};
}

namespace {

// Uniform point in the annulus inner < r <= outer around `center`.
position
annulus_point(rng_stream& rng, position center, double inner, double outer)
{
    const double u = rng.uniform();
    const double r = std::sqrt(inner * inner + u * (outer * outer - inner * inner));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

// k distinct values from [0, n), partial Fisher-Yates.
std::vector<int>
draw_distinct(rng_stream& rng, std::vector<int> pool, std::size_t k)
{
    for (std::size_t i = 0; i < k; ++i)
    {
        const auto j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace

bool
within_sensing_range(const network_topology& topo, const fap& a, const fap& b)
{
    return distance(a.pos, b.pos) <= topo.sensing_factor * (a.radius + b.radius);
}

void
assign_fap_subchannels(network_topology& topo, rng_stream& rng)
{
    for (auto& f : topo.faps)
    {
        std::vector<bool> taken(topo.n_subchannels, false);
        for (const auto& other : topo.faps)
        {
            if (other.id >= f.id)
                break;
            if (!within_sensing_range(topo, f, other))
                continue;
            for (int k : other.subchannels)
                taken[k] = true;
        }
        std::vector<int> free;
        for (int k = 0; k < topo.n_subchannels; ++k)
            if (!taken[k])
                free.push_back(k);
        const std::size_t need = f.fue_ids.size();
        if (free.size() < need)
            throw infeasible_assignment("FAP " + std::to_string(f.id) + " needs " +
                                        std::to_string(need) + " subchannels, " +
                                        std::to_string(free.size()) + " free");
        f.subchannels = draw_distinct(rng, std::move(free), need);
        std::sort(f.subchannels.begin(), f.subchannels.end());
        for (std::size_t j = 0; j < need; ++j)
            topo.fues[f.fue_ids[j]].subchannel = f.subchannels[j];
    }
}

void
assign_subchannels(network_topology& topo, rng_stream& rng)
{
    if (static_cast<int>(topo.mues.size()) > topo.n_subchannels)
        throw infeasible_assignment("more MUEs than subchannels");
    std::vector<int> pool(topo.n_subchannels);
    for (int k = 0; k < topo.n_subchannels; ++k)
        pool[k] = k;
    const auto picks = draw_distinct(rng, std::move(pool), topo.mues.size());
    for (std::size_t m = 0; m < topo.mues.size(); ++m)
        topo.mues[m].subchannel = picks[m];
    assign_fap_subchannels(topo, rng);
}

network_topology
generate_topology(const scenario_config& config, std::uint64_t seed)
{
    validate(config);
    network_topology topo;
    topo.n_subchannels = config.n_subchannels;
    topo.sensing_factor = config.sensing_factor;
    topo.seed = seed;
    rng_stream rng(derive_seed(seed, 0, stream_tag::topology));
    const double p_max = config.p_max_w();

    // Cluster layout: one disc near the cell edge holds every FAP and MUE.
    const bool cluster = config.layout == layout_mode::cluster;
    position center;
    if (cluster)
    {
        const double cr = config.cluster_radius;
        const double hi = config.macro_radius - cr;
        const double lo = std::min(hi, std::max(config.macro_exclusion + cr, 0.6 * config.macro_radius));
        center = annulus_point(rng, {}, lo, hi);
    }

    for (int n = 0; n < config.n_faps; ++n)
    {
        fap f;
        f.id = n;
        f.pos = cluster ? annulus_point(rng, center, 0.0, config.cluster_radius)
                        : annulus_point(rng, {}, 0.0, config.macro_radius);
        f.radius = config.femto_radius;
        topo.faps.push_back(f);
    }
    for (auto& f : topo.faps)
    {
        for (int j = 0; j < config.fues_per_fap; ++j)
        {
            fue u;
            u.id = static_cast<int>(topo.fues.size());
            u.fap_id = f.id;
            u.pos = annulus_point(rng, f.pos, config.femto_exclusion, f.radius);
            u.arrival_rate = config.fue_arrival;
            u.max_power = p_max;
            f.fue_ids.push_back(u.id);
            topo.fues.push_back(u);
        }
    }
    for (int m = 0; m < config.n_mues; ++m)
    {
        mue u;
        u.id = m;
        u.pos = cluster ? annulus_point(rng, center, 0.0, config.cluster_radius)
                        : annulus_point(rng, {}, config.macro_exclusion, config.macro_radius);
        u.arrival_rate = config.mue_arrival;
        u.tx_power = p_max;
        topo.mues.push_back(u);
    }
    assign_subchannels(topo, rng);
    return topo;
}

cochannel_map
cochannel_sets(const network_topology& topo)
{
    cochannel_map out;
    for (const auto& m : topo.mues)
        out[m.subchannel].mue_ids.push_back(m.id);
    for (const auto& u : topo.fues)
        out[u.subchannel].fue_ids.push_back(u.id);
    return out;
}

namespace {

struct fnv1a
{
    std::uint64_t h = 0xcbf29ce484222325ULL;

    void bytes(const void* p, std::size_t n)
    {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i)
        {
            h ^= c[i];
            h *= 0x100000001b3ULL;
        }
    }

    void add(double v) { bytes(&v, sizeof v); }
    void add(std::int64_t v) { bytes(&v, sizeof v); }
    void add(const position& p)
    {
        add(p.x);
        add(p.y);
    }
};

} // namespace

std::uint64_t
structural_hash(const network_topology& topo)
{
    fnv1a f;
    f.add(static_cast<std::int64_t>(topo.n_subchannels));
    f.add(topo.sensing_factor);
    f.add(static_cast<std::int64_t>(topo.seed));
    for (const auto& a : topo.faps)
    {
        f.add(static_cast<std::int64_t>(a.id));
        f.add(a.pos);
        f.add(a.radius);
        for (int k : a.subchannels)
            f.add(static_cast<std::int64_t>(k));
        for (int u : a.fue_ids)
            f.add(static_cast<std::int64_t>(u));
    }
    for (const auto& u : topo.fues)
    {
        f.add(static_cast<std::int64_t>(u.id));
        f.add(static_cast<std::int64_t>(u.fap_id));
        f.add(u.pos);
        f.add(u.arrival_rate);
        f.add(u.max_power);
        f.add(static_cast<std::int64_t>(u.subchannel));
    }
    for (const auto& m : topo.mues)
    {
        f.add(static_cast<std::int64_t>(m.id));
        f.add(m.pos);
        f.add(m.arrival_rate);
        f.add(static_cast<std::int64_t>(m.subchannel));
        f.add(m.tx_power);
    }
    return f.h;
}

void
validate(const network_topology& topo, const scenario_config& config)
{
    auto fail = [](const std::string& what) { throw structural_error(what); };
    const double eps = 1e-9;
    for (std::size_t i = 0; i < topo.faps.size(); ++i)
    {
        const auto& a = topo.faps[i];
        if (a.id != static_cast<int>(i))
            fail("FAP ids must equal their index");
        if (a.pos.norm() > config.macro_radius + eps)
            fail("FAP " + std::to_string(a.id) + " outside the macrocell");
        if (a.subchannels.size() != a.fue_ids.size() || a.fue_ids.empty())
            fail("FAP " + std::to_string(a.id) + " needs one subchannel per FUE");
        for (std::size_t j = 0; j < i; ++j)
        {
            const auto& b = topo.faps[j];
            if (!within_sensing_range(topo, a, b))
                continue;
            for (int k : a.subchannels)
                if (std::find(b.subchannels.begin(), b.subchannels.end(), k) !=
                    b.subchannels.end())
                    fail("FAPs " + std::to_string(b.id) + " and " + std::to_string(a.id) +
                         " share a subchannel within sensing range");
        }
    }
    for (std::size_t i = 0; i < topo.fues.size(); ++i)
    {
        const auto& u = topo.fues[i];
        if (u.id != static_cast<int>(i))
            fail("FUE ids must equal their index");
        if (u.fap_id < 0 || u.fap_id >= static_cast<int>(topo.faps.size()))
            fail("FUE " + std::to_string(u.id) + " has no serving FAP");
        const auto& a = topo.faps[u.fap_id];
        const double d = distance(u.pos, a.pos);
        if (!(d > config.femto_exclusion - eps && d <= a.radius + eps))
            fail("FUE " + std::to_string(u.id) + " outside its FAP annulus");
        if (std::find(a.subchannels.begin(), a.subchannels.end(), u.subchannel) ==
            a.subchannels.end())
            fail("FUE " + std::to_string(u.id) + " subchannel not held by its FAP");
        if (!(u.arrival_rate > 0.0))
            fail("FUE " + std::to_string(u.id) + " has no traffic");
    }
    std::set<int> used;
    for (std::size_t i = 0; i < topo.mues.size(); ++i)
    {
        const auto& m = topo.mues[i];
        if (m.id != static_cast<int>(i))
            fail("MUE ids must equal their index");
        const double r = m.pos.norm();
        if (r < config.macro_exclusion - eps || r > config.macro_radius + eps)
            fail("MUE " + std::to_string(m.id) + " outside the macro annulus");
        if (m.subchannel < 0 || m.subchannel >= topo.n_subchannels)
            fail("MUE " + std::to_string(m.id) + " has no subchannel");
        if (!used.insert(m.subchannel).second)
            fail("two MUEs share subchannel " + std::to_string(m.subchannel));
        if (m.tx_power > config.p_max_w() * (1.0 + eps))
            fail("MUE " + std::to_string(m.id) + " exceeds the power limit");
    }
}

void
write_topology_csv(std::ostream& os, const network_topology& topo)
{
    os << "id,kind,x,y,subchannel,fap_id\n";
    os << "0,mbs,0,0,,\n";
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    for (const auto& a : topo.faps)
    {
        os << a.id << ",fap," << num(a.pos.x) << ',' << num(a.pos.y) << ',';
        for (std::size_t j = 0; j < a.subchannels.size(); ++j)
            os << (j ? ";" : "") << a.subchannels[j];
        os << ',' << a.id << '\n';
    }
    for (const auto& u : topo.fues)
        os << u.id << ",fue," << num(u.pos.x) << ',' << num(u.pos.y) << ',' << u.subchannel << ','
           << u.fap_id << '\n';
    for (const auto& m : topo.mues)
        os << m.id << ",mue," << num(m.pos.x) << ',' << num(m.pos.y) << ',' << m.subchannel
           << ",\n";
}

} // namespace femtocoop
