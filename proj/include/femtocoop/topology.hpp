/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_TOPOLOGY_HPP
#define FEMTOCOOP_TOPOLOGY_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace femtocoop {

struct scenario_config;
class rng_stream;

struct position
{
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
    friend bool operator==(const position&, const position&) = default;
};

inline double
distance(const position& a, const position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class node_kind : std::uint8_t
{
    mbs,
    fap,
    fue,
    mue,
};

/// A transmitter or receiver in the layout: kind plus index into the
/// corresponding topology vector (index is ignored for the MBS).
struct node_ref
{
    node_kind kind = node_kind::mbs;
    int index = 0;

    friend bool operator==(const node_ref&, const node_ref&) = default;
};

inline constexpr node_ref mbs_node{node_kind::mbs, 0};

struct fap
{
    int id = 0;
    position pos;
    double radius = 20.0;
    std::vector<int> subchannels;
    std::vector<int> fue_ids;
};

struct fue
{
    int id = 0;
    int fap_id = 0;
    position pos;
    double arrival_rate = 150e3; ///< bits/s
    double max_power = 0.1;      ///< W
    int subchannel = -1;
};

struct mue
{
    int id = 0;
    position pos;
    double arrival_rate = 150e3; ///< bits/s
    int subchannel = -1;
    double tx_power = 0.1; ///< W
};

/// Two-tier layout. The MBS sits at the origin. Ids equal vector indices.
struct network_topology
{
    std::vector<fap> faps;
    std::vector<fue> fues;
    std::vector<mue> mues;
    int n_subchannels = 500;
    double sensing_factor = 2.0;
    std::uint64_t seed = 0;

    position pos(node_ref n) const;
    int n_players() const { return static_cast<int>(mues.size() + fues.size()); }
};

/// Co-channel index entry: every player transmitting on one subchannel.
struct cochannel_entry
{
    std::vector<int> mue_ids;
    std::vector<int> fue_ids;
};

using cochannel_map = std::map<int, cochannel_entry>;

/// Draws FAP centers, MUEs and FUEs and assigns subchannels. Deterministic
/// in (config, seed). Throws infeasible_assignment when the pool cannot
/// satisfy the constraints.
network_topology generate_topology(const scenario_config& config, std::uint64_t seed);

/// Gives every FAP subchannels disjoint from all FAPs within sensing range
/// (greedy in id order, uniform choice among free subchannels) and every MUE
/// a distinct subchannel. FUE j of a FAP uses that FAP's j-th subchannel.
void assign_subchannels(network_topology& topo, rng_stream& rng);

/// FAP-only part of assign_subchannels.
void assign_fap_subchannels(network_topology& topo, rng_stream& rng);

/// True when two FAP coverage discs, each inflated by the sensing factor,
/// overlap.
bool within_sensing_range(const network_topology& topo, const fap& a, const fap& b);

cochannel_map cochannel_sets(const network_topology& topo);

/// FNV-1a over every field; equal topologies hash equal.
std::uint64_t structural_hash(const network_topology& topo);

/// Throws structural_error if ids, subchannels or placement bounds are
/// inconsistent with the config that generated the layout.
void validate(const network_topology& topo, const scenario_config& config);

/// `id,kind,x,y,subchannel,fap_id` rows; FAP subchannel sets are
/// ';'-separated.
void write_topology_csv(std::ostream& os, const network_topology& topo);

} // namespace femtocoop

#endif
