/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_CHANNEL_HPP
#define FEMTOCOOP_CHANNEL_HPP

#include "femtocoop/topology.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>

namespace femtocoop {

class rng_stream;

enum class link_class : std::uint8_t
{
    indoor,
    outdoor,
};

enum class fading_mode : std::uint8_t
{
    closed_form,
    monte_carlo,
};

struct channel_params
{
    double indoor_intercept_db = 37.0;
    double indoor_slope_db = 30.0;
    double outdoor_intercept_db = 15.3;
    double outdoor_slope_db = 37.6;
    double wall_loss_db = 12.0;
    double shadow_sigma_db = 10.0;
    double noise_density_dbm_hz = -174.0;
    double bandwidth_hz = 180e3;
    fading_mode fading = fading_mode::closed_form;
    int n_fading_draws = 1000;
    /// Monte-Carlo mode only: also draw fast fading on interferers.
    bool fade_interferers = true;
    /// Link distances are clamped to this before path loss (the model's
    /// reference distance).
    double min_distance_m = 1.0;
};

/// Path loss in dB. Throws std::domain_error for distance <= 0.
double path_loss_db(link_class cls, double distance_m, const channel_params& params = {});

/// Thermal noise over one subchannel, in watts.
double noise_power_w(const channel_params& params);

double dbm_to_w(double dbm);
double w_to_dbm(double w);
double db_to_linear(double db);

double sinr(double signal_w, std::span<const double> interferers_w, double noise_w);

/// Pr{SINR >= gamma} with unit-mean exponential fading on the signal only;
/// interference held at its mean.
double success_probability_closed_form(double mean_signal_w,
                                       std::span<const double> mean_interferers_w,
                                       double gamma,
                                       double noise_w);

/// Empirical Pr{SINR >= gamma} over `n_draws` fading realisations.
double success_probability_monte_carlo(double mean_signal_w,
                                       std::span<const double> mean_interferers_w,
                                       double gamma,
                                       double noise_w,
                                       int n_draws,
                                       bool fade_interferers,
                                       rng_stream& rng);

/// Dispatches on params.fading. The Monte-Carlo stream is seeded from
/// `fading_seed` so repeated calls for the same link agree.
double success_probability(double mean_signal_w,
                           std::span<const double> mean_interferers_w,
                           double gamma,
                           const channel_params& params,
                           std::uint64_t fading_seed = 0);

struct link_gain
{
    node_ref tx;
    node_ref rx;
    double mean_gain = 0.0; ///< linear, shadowing included, no fast fading
    int n_walls = 0;
    link_class cls = link_class::outdoor;
    double distance = 0.0;
};

/// Indoor/outdoor class and wall count for a link, from endpoint kinds.
/// FUE<->own FAP is indoor; FUE<->another FAP crosses two walls; MUE<->FUE,
/// MUE<->FAP and FUE<->MBS cross one; MUE<->MBS is plain outdoor.
std::pair<link_class, int> classify_link(const network_topology& topo, node_ref a, node_ref b);

/// Mean link gains for one round. Shadowing is frozen per (round, link)
/// and reciprocal; samples are drawn lazily from a hash of the link, so the
/// table is reproducible regardless of query order. Not thread-safe: each
/// round owns its own instance.
class channel_model
{
  public:
    channel_model(const network_topology& topo, channel_params params, std::uint64_t shadow_seed);

    const channel_params& params() const { return params_; }
    const network_topology& topology() const { return *topo_; }
    double noise() const { return noise_w_; }

    link_gain gain(node_ref tx, node_ref rx) const;
    double mean_gain(node_ref tx, node_ref rx) const;

    /// Replace every shadowing sample with a fixed value in dB (tests).
    void force_shadowing_db(std::optional<double> value);

  private:
    static std::uint64_t key(node_ref n);

    const network_topology* topo_;
    channel_params params_;
    std::uint64_t shadow_seed_;
    double noise_w_;
    std::optional<double> forced_shadow_db_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
};

} // namespace femtocoop

#endif
