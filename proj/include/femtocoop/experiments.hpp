/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_EXPERIMENTS_HPP
#define FEMTOCOOP_EXPERIMENTS_HPP

#include "femtocoop/coalition.hpp"
#include "femtocoop/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace femtocoop {

/// Seed of round `index` under a master seed.
std::uint64_t round_seed(std::uint64_t master, std::uint64_t index);

/// Topology for one round, with the tracked MUE and FAP moved onto the
/// x-axis when `mue_separation` is set (mobility scenario).
network_topology make_round_topology(const scenario_config& cfg,
                                     std::uint64_t seed,
                                     double mue_separation = -1.0);

/// Guests admitted under open access: each MUE inside an FAP disc (the
/// closest one if several) moves to that FAP's least interfered subchannel
/// among those no FAP in sensing range holds or hands out.
std::vector<guest> baseline_open_access(const game_model& g);

/// Payoffs of every player under `policy`. Closed and non-cooperative
/// access coincide: all players stand alone.
struct policy_outcome
{
    outcome result;
    int iterations = 0;
    bool converged = true;
    std::vector<guest> guests;
};

policy_outcome play_policy(const game_model& g, access_policy policy);

struct round_metrics
{
    std::uint64_t seed = 0;
    bool skipped = false; ///< subchannel assignment infeasible
    double mue_gain_pct = 0.0;
    double fue_gain_pct = 0.0;
    double mue_payoff = 0.0;
    double fue_payoff = 0.0;
    double coalition_size = 1.0; ///< players per coalition, singletons included
    int coalitions = 0;          ///< cooperative coalitions
    int iterations = 0;
    int guests = 0;
    /// Members whose payoff does not exceed their non-cooperative payoff.
    int rationality_violations = 0;
    std::vector<double> alphas;    ///< one per serviced MUE
    std::vector<double> distances; ///< relay FUE to MBS, one per cooperative coalition
    double tracked_gain_pct = 0.0; ///< MUE 0, mobility scenario
    bool tracked_cooperates = false;
};

/// One topology draw under `cfg.policy`, compared against `cfg.baseline`.
round_metrics run_round(const scenario_config& cfg, std::uint64_t seed, double mue_separation = -1.0);

struct cdf_point
{
    double value;
    double probability; ///< fraction of samples <= value
};

/// Empirical CDF at `knots` equally spaced quantile levels.
std::vector<cdf_point> aggregate_cdf(std::vector<double> samples, int knots);

struct metric_summary
{
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;

    double half_width_95() const { return 1.959963984540054 * stderr_; }
};

/// Streaming mean and variance with Neumaier-compensated sums; adding the
/// same samples in the same order gives bit-identical results.
class accumulator
{
  public:
    void add(double x);
    metric_summary summary() const;

  private:
    double sum_ = 0.0, comp_ = 0.0;
    double sq_ = 0.0, sq_comp_ = 0.0;
    long n_ = 0;
};

struct sweep_point
{
    std::map<std::string, double> axes;
    std::map<std::string, metric_summary> metrics;
    std::vector<int> alpha_histogram; ///< 20 bins over (0, 1]
    std::vector<cdf_point> distance_cdf;
    int skipped = 0;
};

struct metrics_report
{
    std::string scenario;
    std::vector<std::string> axis_names;
    std::vector<sweep_point> points;
};

/// Cartesian product of the configured axes, `cfg.rounds` rounds per point
/// on `cfg.jobs` threads. Round r of every point uses round_seed(seed, r).
/// `per_round`, when given, receives every round in order.
metrics_report sweep(const scenario_config& cfg,
                     std::vector<std::vector<round_metrics>>* per_round = nullptr);

/// `cfg` with one sweep point's axis values applied.
scenario_config apply_axes(const scenario_config& cfg, const std::map<std::string, double>& axes);

/// Rows `<axes...>,metric,mean,stderr,n`.
void write_report_csv(std::ostream& os, const metrics_report& r);
void write_report_json(std::ostream& os, const metrics_report& r);
/// Rows `round,seed,<metrics...>`.
void write_rounds_csv(std::ostream& os, const std::vector<round_metrics>& rounds);

/// `<scenario>_<axis>_<timestamp>.csv`, axes joined by '-', "point" if none.
std::string report_file_name(const metrics_report& r, const std::string& timestamp, const std::string& ext);

} // namespace femtocoop

#endif
