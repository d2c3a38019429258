/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/experiments.hpp"

#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace femtocoop {

std::uint64_t
round_seed(std::uint64_t master, std::uint64_t index)
{
    return derive_seed(master, index, stream_tag::round);
}

network_topology
make_round_topology(const scenario_config& cfg, std::uint64_t seed, double mue_separation)
{
    auto topo = generate_topology(cfg, seed);
    if (mue_separation < 0.0)
        return topo;
    if (topo.faps.empty() || topo.mues.empty())
        throw config_error("sweep.mue_path", "mobility scenario needs at least one FAP and one MUE");
    auto& f = topo.faps[0];
    const position to{cfg.path_fap_x, 0.0};
    for (int u : f.fue_ids)
    {
        topo.fues[u].pos.x += to.x - f.pos.x;
        topo.fues[u].pos.y += to.y - f.pos.y;
    }
    f.pos = to;
    topo.mues[0].pos = {cfg.path_fap_x - mue_separation, 0.0};
    rng_stream rng(derive_seed(seed, 1, stream_tag::topology));
    assign_fap_subchannels(topo, rng);
    return topo;
}

namespace {

node_ref
fap_ref(int n)
{
    return {node_kind::fap, n};
}

double
sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

} // namespace

std::vector<guest>
baseline_open_access(const game_model& g)
{
    const auto& topo = g.topology();
    const emitter_map em(g, partition::singletons(g.n_mues(), g.n_fues()));
    std::vector<std::vector<int>> handed(topo.faps.size());
    std::vector<guest> out;
    for (const auto& u : topo.mues)
    {
        int host = -1;
        double best = 0.0;
        for (const auto& f : topo.faps)
        {
            const double d = distance(u.pos, f.pos);
            if (d <= f.radius && (host < 0 || d < best))
            {
                host = f.id;
                best = d;
            }
        }
        if (host < 0)
            continue;

        const auto& f = topo.faps[host];
        std::vector<bool> blocked(topo.n_subchannels, false);
        for (const auto& other : topo.faps)
        {
            if (other.id != f.id && !within_sensing_range(topo, f, other))
                continue;
            for (int k : other.subchannels)
                blocked[k] = true;
            for (int k : handed[other.id])
                blocked[k] = true;
        }
        int pick = -1;
        double least = 0.0;
        for (int k = 0; k < topo.n_subchannels; ++k)
        {
            if (blocked[k])
                continue;
            const double i = sum(em.at(fap_ref(host), k, -1, {u.id}));
            if (pick < 0 || i < least)
            {
                pick = k;
                least = i;
            }
        }
        if (pick < 0)
            continue;
        handed[host].push_back(pick);
        out.push_back({u.id, host, pick});
    }
    return out;
}

policy_outcome
play_policy(const game_model& g, access_policy policy)
{
    policy_outcome out;
    switch (policy)
    {
    case access_policy::cooperative: {
        auto f = form_coalitions(g);
        out.result = std::move(f.result);
        out.iterations = f.iterations;
        out.converged = f.converged;
        break;
    }
    case access_policy::open:
        out.guests = baseline_open_access(g);
        out.result = evaluate_partition(g, partition::singletons(g.n_mues(), g.n_fues()), out.guests);
        break;
    case access_policy::closed:
    case access_policy::noncooperative:
        out.result = evaluate_partition(g, partition::singletons(g.n_mues(), g.n_fues()));
        break;
    }
    return out;
}

round_metrics
run_round(const scenario_config& cfg, std::uint64_t seed, double mue_separation)
{
    round_metrics rm;
    rm.seed = seed;
    network_topology topo;
    try
    {
        topo = make_round_topology(cfg, seed, mue_separation);
    }
    catch (const infeasible_assignment&)
    {
        rm.skipped = true;
        return rm;
    }
    const channel_model ch(topo, cfg.channel, derive_seed(seed, 0, stream_tag::shadowing));
    const game_model g(topo, ch, cfg);

    const auto played = play_policy(g, cfg.policy);
    const auto base = cfg.baseline == cfg.policy ? played : play_policy(g, cfg.baseline);
    const auto x = payoff_values(played.result);
    const auto x0 = payoff_values(base.result);

    auto gain = [&](int p) { return 100.0 * (x[p] / x0[p] - 1.0); };
    accumulator mg, fg, mp, fp;
    for (int m = 0; m < g.n_mues(); ++m)
    {
        const int p = g.mue_player(m);
        if (x0[p] > 0.0)
            mg.add(gain(p));
        mp.add(x[p]);
    }
    for (int l = 0; l < g.n_fues(); ++l)
    {
        const int p = g.fue_player(l);
        if (x0[p] > 0.0)
            fg.add(gain(p));
        fp.add(x[p]);
    }
    rm.mue_gain_pct = mg.summary().mean;
    rm.fue_gain_pct = fg.summary().mean;
    rm.mue_payoff = mp.summary().mean;
    rm.fue_payoff = fp.summary().mean;

    const auto& coalitions = played.result.part.coalitions;
    if (!coalitions.empty())
        rm.coalition_size = static_cast<double>(g.n_players()) / static_cast<double>(coalitions.size());
    for (const auto& c : coalitions)
    {
        if (!c.cooperative())
            continue;
        ++rm.coalitions;
        rm.distances.push_back(topo.fues[c.relay_fue].pos.norm());
        for (const auto& t : c.lease)
            rm.alphas.push_back(t.alpha);
        auto below = [&](int p) { return !(x[p] > g.noncoop_payoff(p).value); };
        rm.rationality_violations += below(g.fue_player(c.relay_fue));
        for (int m : c.mue_ids)
            rm.rationality_violations += below(g.mue_player(m));
    }
    rm.iterations = played.iterations;
    rm.guests = static_cast<int>(played.guests.size());

    if (mue_separation >= 0.0)
    {
        const int p = g.mue_player(0);
        rm.tracked_gain_pct = x0[p] > 0.0 ? gain(p) : 0.0;
        for (const auto& c : coalitions)
            if (c.cooperative() && std::find(c.mue_ids.begin(), c.mue_ids.end(), 0) != c.mue_ids.end())
                rm.tracked_cooperates = true;
    }
    return rm;
}

std::vector<cdf_point>
aggregate_cdf(std::vector<double> samples, int knots)
{
    std::vector<cdf_point> out;
    if (samples.empty() || knots < 1)
        return out;
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    for (int i = 1; i <= knots; ++i)
    {
        const double level = static_cast<double>(i) / knots;
        auto idx = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
        idx = std::clamp<std::size_t>(idx, 1, n) - 1;
        const double v = samples[idx];
        const auto below = std::upper_bound(samples.begin(), samples.end(), v) - samples.begin();
        out.push_back({v, static_cast<double>(below) / static_cast<double>(n)});
    }
    return out;
}

void
accumulator::add(double x)
{
    auto neumaier = [](double& s, double& c, double v) {
        const double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    };
    neumaier(sum_, comp_, x);
    neumaier(sq_, sq_comp_, x * x);
    ++n_;
}

metric_summary
accumulator::summary() const
{
    metric_summary s;
    s.n = n_;
    if (n_ == 0)
        return s;
    const double n = static_cast<double>(n_);
    s.mean = (sum_ + comp_) / n;
    if (n_ > 1)
    {
        const double var = std::max(0.0, ((sq_ + sq_comp_) - n * s.mean * s.mean) / (n - 1.0));
        s.stderr_ = std::sqrt(var / n);
    }
    return s;
}

scenario_config
apply_axes(const scenario_config& cfg, const std::map<std::string, double>& axes)
{
    auto c = cfg;
    for (const auto& [name, v] : axes)
    {
        if (name == "M")
            c.n_mues = static_cast<int>(std::lround(v));
        else if (name == "N")
            c.n_faps = static_cast<int>(std::lround(v));
        else if (name == "delta")
            c.delta = v;
        else if (name == "r")
            c.femto_radius = v;
    }
    c.axes.clear();
    validate(c);
    return c;
}

namespace {

std::vector<std::map<std::string, double>>
grid(const scenario_config& cfg)
{
    std::vector<std::map<std::string, double>> out{{}};
    for (const auto& [name, values] : cfg.axes)
    {
        std::vector<std::map<std::string, double>> next;
        for (const auto& p : out)
            for (double v : values)
            {
                auto q = p;
                q[name] = v;
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

sweep_point
summarize(const std::map<std::string, double>& axes,
          const std::vector<round_metrics>& rounds,
          const scenario_config& cfg)
{
    sweep_point pt;
    pt.axes = axes;
    pt.alpha_histogram.assign(20, 0);
    std::map<std::string, accumulator> acc;
    std::vector<double> distances;
    const bool tracked = axes.count("mue_path") > 0;
    for (const auto& r : rounds)
    {
        if (r.skipped)
        {
            ++pt.skipped;
            continue;
        }
        acc["mue_gain_pct"].add(r.mue_gain_pct);
        acc["fue_gain_pct"].add(r.fue_gain_pct);
        acc["mue_payoff"].add(r.mue_payoff);
        acc["fue_payoff"].add(r.fue_payoff);
        acc["coalition_size"].add(r.coalition_size);
        acc["coalitions"].add(r.coalitions);
        acc["iterations"].add(r.iterations);
        acc["guests"].add(r.guests);
        acc["rationality_violations"].add(r.rationality_violations);
        for (double a : r.alphas)
        {
            acc["alpha"].add(a);
            const auto bin = std::clamp<long>(std::lround(a * 20.0) - 1, 0, 19);
            ++pt.alpha_histogram[bin];
        }
        for (double d : r.distances)
        {
            acc["distance"].add(d);
            distances.push_back(d);
        }
        if (tracked)
        {
            acc["tracked_gain_pct"].add(r.tracked_gain_pct);
            acc["tracked_cooperates"].add(r.tracked_cooperates ? 1.0 : 0.0);
        }
    }
    acc["alpha"];
    acc["distance"];
    for (const auto& [name, a] : acc)
        pt.metrics[name] = a.summary();
    pt.distance_cdf = aggregate_cdf(std::move(distances), cfg.cdf_knots);
    return pt;
}

std::string
num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

metrics_report
sweep(const scenario_config& cfg, std::vector<std::vector<round_metrics>>* per_round)
{
    const auto points = grid(cfg);
    std::vector<scenario_config> configs;
    for (const auto& p : points)
        configs.push_back(apply_axes(cfg, p));

    const std::size_t rounds = static_cast<std::size_t>(cfg.rounds);
    const std::size_t total = points.size() * rounds;
    std::vector<std::vector<round_metrics>> results(points.size(), std::vector<round_metrics>(rounds));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (;;)
        {
            const auto job = next.fetch_add(1);
            if (job >= total)
                return;
            const auto pi = job / rounds;
            const auto r = job % rounds;
            try
            {
                const auto it = points[pi].find("mue_path");
                const double sep = it == points[pi].end() ? -1.0 : it->second;
                results[pi][r] = run_round(configs[pi], round_seed(cfg.seed, r), sep);
            }
            catch (...)
            {
                std::lock_guard lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
                next = total;
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(std::max<std::size_t>(1, total))));
    if (jobs == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    metrics_report report;
    report.scenario = cfg.scenario;
    for (const auto& [name, values] : cfg.axes)
        report.axis_names.push_back(name);
    for (std::size_t i = 0; i < points.size(); ++i)
        report.points.push_back(summarize(points[i], results[i], configs[i]));
    if (per_round)
        *per_round = std::move(results);
    return report;
}

void
write_report_csv(std::ostream& os, const metrics_report& r)
{
    for (const auto& a : r.axis_names)
        os << a << ',';
    os << "metric,mean,stderr,n\n";
    for (const auto& p : r.points)
        for (const auto& [name, m] : p.metrics)
        {
            for (const auto& a : r.axis_names)
                os << num(p.axes.at(a)) << ',';
            os << name << ',' << num(m.mean) << ',' << num(m.stderr_) << ',' << m.n << '\n';
        }
}

void
write_report_json(std::ostream& os, const metrics_report& r)
{
    using nlohmann::json;
    json out;
    out["scenario"] = r.scenario;
    out["axes"] = r.axis_names;
    out["points"] = json::array();
    for (const auto& p : r.points)
    {
        json jp;
        jp["axes"] = p.axes;
        jp["skipped"] = p.skipped;
        json metrics = json::object();
        for (const auto& [name, m] : p.metrics)
            metrics[name] = {{"mean", m.mean}, {"stderr", m.stderr_}, {"n", m.n}, {"ci95", m.half_width_95()}};
        jp["metrics"] = metrics;
        jp["alpha_histogram"] = p.alpha_histogram;
        json cdf = json::array();
        for (const auto& c : p.distance_cdf)
            cdf.push_back({c.value, c.probability});
        jp["distance_cdf"] = cdf;
        out["points"].push_back(jp);
    }
    os << out.dump(2) << '\n';
}

void
write_rounds_csv(std::ostream& os, const std::vector<round_metrics>& rounds)
{
    os << "round,seed,skipped,mue_gain_pct,fue_gain_pct,mue_payoff,fue_payoff,coalition_size,"
          "coalitions,iterations,guests,rationality_violations,mean_alpha\n";
    for (std::size_t i = 0; i < rounds.size(); ++i)
    {
        const auto& r = rounds[i];
        accumulator a;
        for (double x : r.alphas)
            a.add(x);
        os << i << ',' << r.seed << ',' << (r.skipped ? 1 : 0) << ',' << num(r.mue_gain_pct) << ','
           << num(r.fue_gain_pct) << ',' << num(r.mue_payoff) << ',' << num(r.fue_payoff) << ','
           << num(r.coalition_size) << ',' << r.coalitions << ',' << r.iterations << ',' << r.guests << ','
           << r.rationality_violations << ',' << num(a.summary().mean) << '\n';
    }
}

std::string
report_file_name(const metrics_report& r, const std::string& timestamp, const std::string& ext)
{
    std::string axes;
    for (const auto& a : r.axis_names)
        axes += (axes.empty() ? "" : "-") + a;
    if (axes.empty())
        axes = "point";
    return r.scenario + "_" + axes + "_" + timestamp + ext;
}

} // namespace femtocoop
