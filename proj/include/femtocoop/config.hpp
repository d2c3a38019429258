/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_CONFIG_HPP
#define FEMTOCOOP_CONFIG_HPP

#include "femtocoop/channel.hpp"
#include "femtocoop/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace femtocoop {

enum class access_policy : std::uint8_t
{
    closed,
    open,
    cooperative,
    noncooperative,
};

/// Objective of the FUE's inner (beta, power) search.
enum class lease_objective : std::uint8_t
{
    /// Maximise the FUE's own payoff subject to member vetoes.
    fue_payoff,
    /// Maximise the product of the relative gains of the joining MUE and
    /// the FUE (Nash bargaining), subject to the same vetoes.
    nash_bargaining,
};

/// Where players are dropped.
enum class layout_mode : std::uint8_t
{
    /// FAPs over the whole macrocell, MUEs over the macro annulus.
    uniform,
    /// Every FAP and MUE inside one small disc near the cell edge; used
    /// for the exhaustive-search instances.
    cluster,
};

struct scenario_config
{
    std::string scenario = "default";

    // layout
    int n_faps = 0;
    int n_mues = 0;
    int fues_per_fap = 1;
    double macro_radius = 1000.0;
    double macro_exclusion = 50.0;
    double femto_radius = 20.0;
    double femto_exclusion = 0.2;
    int n_subchannels = 500;
    double sensing_factor = 2.0;
    layout_mode layout = layout_mode::uniform;
    double cluster_radius = 60.0;

    // traffic and radio
    double mue_arrival = 150e3;
    double fue_arrival = 150e3;
    int max_transmissions = 4;
    double gamma_mue_db = 10.0;
    double gamma_fue_db = 15.0;
    double p_max_dbm = 20.0;
    double delta = 0.5;
    arrival_mode arrivals = arrival_mode::literal;
    relay_service_mode relay_service = relay_service_mode::relay_slice;
    bool path_loss_compensation = false;
    double compensation_target_dbm = -80.0;
    double d2d_target_snr_db = 20.0;
    double d2d_range = 50.0;
    int max_coalition_size = 6;
    int revisit_limit = 5; ///< times an MUE may leave the same FUE during formation
    int packet_size_bits = 1000;
    channel_params channel;

    // lease search
    double alpha_step = 0.05;
    double beta_step = 0.01;
    int power_points = 64;
    lease_objective objective = lease_objective::nash_bargaining;

    // experiment
    access_policy policy = access_policy::cooperative;
    access_policy baseline = access_policy::noncooperative;
    int rounds = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    int cdf_knots = 20;
    /// Sweep axes by name (M, N, delta, r, mue_path); empty means a single
    /// point at the base values.
    std::map<std::string, std::vector<double>> axes;
    /// Mobility scenario: the FAP under study sits on the x-axis here.
    double path_fap_x = 800.0;

    double p_max_w() const;
    double gamma_mue() const;
    double gamma_fue() const;
};

/// Parse a YAML scenario file. Missing required keys and out-of-range
/// values raise config_error with the line of the offending node. Keys may
/// be overridden by FEMTOCOOP_<KEY> environment variables (upper-case,
/// dots for nesting replaced by '_').
scenario_config load_config(const std::filesystem::path& path);
scenario_config parse_config(const std::string& text);

/// Range checks shared by file parsing and programmatic construction.
void validate(const scenario_config& cfg);

std::string to_string(access_policy p);
access_policy parse_policy(const std::string& s);

} // namespace femtocoop

#endif
