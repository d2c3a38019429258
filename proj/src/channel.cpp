/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/channel.hpp"

#include "femtocoop/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace femtocoop {

double
path_loss_db(link_class cls, double distance_m, const channel_params& params)
{
    if (!(distance_m > 0.0))
        throw std::domain_error("path loss needs a positive distance");
    const double lg = std::log10(distance_m);
    if (cls == link_class::indoor)
        return params.indoor_intercept_db + params.indoor_slope_db * lg;
    return params.outdoor_intercept_db + params.outdoor_slope_db * lg;
}

double
dbm_to_w(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double
w_to_dbm(double w)
{
    return 10.0 * std::log10(w) + 30.0;
}

double
db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double
noise_power_w(const channel_params& params)
{
    return dbm_to_w(params.noise_density_dbm_hz + 10.0 * std::log10(params.bandwidth_hz));
}

double
sinr(double signal_w, std::span<const double> interferers_w, double noise_w)
{
    const double interference = std::accumulate(interferers_w.begin(), interferers_w.end(), 0.0);
    return signal_w / (interference + noise_w);
}

double
success_probability_closed_form(double mean_signal_w,
                                std::span<const double> mean_interferers_w,
                                double gamma,
                                double noise_w)
{
    if (!(mean_signal_w > 0.0))
        return 0.0;
    const double interference =
        std::accumulate(mean_interferers_w.begin(), mean_interferers_w.end(), 0.0);
    return std::exp(-gamma * (interference + noise_w) / mean_signal_w);
}

double
success_probability_monte_carlo(double mean_signal_w,
                                std::span<const double> mean_interferers_w,
                                double gamma,
                                double noise_w,
                                int n_draws,
                                bool fade_interferers,
                                rng_stream& rng)
{
    if (n_draws <= 0)
        throw std::invalid_argument("monte-carlo outage needs a positive draw count");
    const double mean_interference =
        std::accumulate(mean_interferers_w.begin(), mean_interferers_w.end(), 0.0);
    long hits = 0;
    for (int d = 0; d < n_draws; ++d)
    {
        const double s = mean_signal_w * rng.exponential();
        double i = mean_interference;
        if (fade_interferers)
        {
            i = 0.0;
            for (double p : mean_interferers_w)
                i += p * rng.exponential();
        }
        if (s >= gamma * (i + noise_w))
            ++hits;
    }
    return static_cast<double>(hits) / n_draws;
}

double
success_probability(double mean_signal_w,
                    std::span<const double> mean_interferers_w,
                    double gamma,
                    const channel_params& params,
                    std::uint64_t fading_seed)
{
    const double noise = noise_power_w(params);
    if (params.fading == fading_mode::closed_form)
        return success_probability_closed_form(mean_signal_w, mean_interferers_w, gamma, noise);
    rng_stream rng(fading_seed);
    return success_probability_monte_carlo(mean_signal_w,
                                           mean_interferers_w,
                                           gamma,
                                           noise,
                                           params.n_fading_draws,
                                           params.fade_interferers,
                                           rng);
}

namespace {

int
fap_of(const network_topology& topo, node_ref n)
{
    return n.kind == node_kind::fue ? topo.fues[n.index].fap_id : -1;
}

} // namespace

std::pair<link_class, int>
classify_link(const network_topology& topo, node_ref a, node_ref b)
{
    auto is = [&](node_kind x, node_kind y) {
        return (a.kind == x && b.kind == y) || (a.kind == y && b.kind == x);
    };
    if (is(node_kind::fue, node_kind::fap))
    {
        const node_ref u = a.kind == node_kind::fue ? a : b;
        const node_ref f = a.kind == node_kind::fap ? a : b;
        if (fap_of(topo, u) == f.index)
            return {link_class::indoor, 0};
        return {link_class::outdoor, 2};
    }
    if (is(node_kind::fue, node_kind::fue))
    {
        if (fap_of(topo, a) == fap_of(topo, b))
            return {link_class::indoor, 0};
        return {link_class::outdoor, 2};
    }
    if (is(node_kind::mue, node_kind::mbs))
        return {link_class::outdoor, 0};
    if (is(node_kind::mue, node_kind::mue))
        return {link_class::outdoor, 0};
    if (is(node_kind::fap, node_kind::fap))
        return {link_class::outdoor, 2};
    // MUE<->FUE, MUE<->FAP, FUE<->MBS, FAP<->MBS
    return {link_class::outdoor, 1};
}

channel_model::channel_model(const network_topology& topo,
                             channel_params params,
                             std::uint64_t shadow_seed)
    : topo_(&topo),
      params_(params),
      shadow_seed_(shadow_seed),
      noise_w_(noise_power_w(params))
{
}

std::uint64_t
channel_model::key(node_ref n)
{
    return (static_cast<std::uint64_t>(n.kind) << 30) | static_cast<std::uint32_t>(n.index);
}

void
channel_model::force_shadowing_db(std::optional<double> value)
{
    forced_shadow_db_ = value;
    cache_.clear();
}

link_gain
channel_model::gain(node_ref tx, node_ref rx) const
{
    if (tx == rx)
        throw std::invalid_argument("link endpoints must differ");
    const auto [cls, walls] = classify_link(*topo_, tx, rx);
    const double d = std::max(distance(topo_->pos(tx), topo_->pos(rx)), params_.min_distance_m);

    std::uint64_t ka = key(tx);
    std::uint64_t kb = key(rx);
    if (ka > kb)
        std::swap(ka, kb);
    double shadow = 0.0;
    if (forced_shadow_db_)
        shadow = *forced_shadow_db_;
    else if (params_.shadow_sigma_db > 0.0)
        shadow = params_.shadow_sigma_db * hashed_normal(shadow_seed_, ka, kb);

    const double loss_db = path_loss_db(cls, d, params_) + walls * params_.wall_loss_db + shadow;
    return link_gain{tx, rx, std::pow(10.0, -loss_db / 10.0), walls, cls, d};
}

double
channel_model::mean_gain(node_ref tx, node_ref rx) const
{
    std::uint64_t ka = key(tx);
    std::uint64_t kb = key(rx);
    if (ka > kb)
        std::swap(ka, kb);
    const std::uint64_t k = (ka << 32) | kb;
    if (auto it = cache_.find(k); it != cache_.end())
        return it->second;
    const double g = gain(tx, rx).mean_gain;
    cache_.emplace(k, g);
    return g;
}

} // namespace femtocoop
