/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

// femtocoop: run scenarios, sweeps and oracle checks from a YAML config.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad config or refused
// request, 3 infeasible scenario.

#include "femtocoop/error.hpp"
#include "femtocoop/experiments.hpp"
#include "femtocoop/oracle.hpp"
#include "femtocoop/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace femtocoop;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_other = 1;
constexpr int exit_config = 2;
constexpr int exit_infeasible = 3;

struct common_opts
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<int> jobs;
    bool quiet = false;
    std::optional<std::string> policy;
    std::optional<int> rounds;
};

void
add_common(CLI::App* cmd, common_opts& o)
{
    cmd->add_option("--config", o.config, "scenario YAML file")->required();
    cmd->add_option("--seed", o.seed, "master seed override");
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "worker threads");
    cmd->add_flag("--quiet", o.quiet, "machine-readable summary only on stdout");
    cmd->add_option("--policy", o.policy, "closed|open|coop|noncoop");
    cmd->add_option("--rounds", o.rounds, "rounds per sweep point");
}

scenario_config
load(const common_opts& o)
{
    auto cfg = load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.jobs)
        cfg.jobs = *o.jobs;
    if (o.policy)
        cfg.policy = parse_policy(*o.policy);
    if (o.rounds)
        cfg.rounds = *o.rounds;
    validate(cfg);
    return cfg;
}

std::string
timestamp()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path
write_file(const fs::path& dir, const std::string& name, const std::string& body)
{
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << body;
    return path;
}

template <typename F>
std::string
render(F&& f)
{
    std::ostringstream os;
    f(os);
    return os.str();
}

void
print_table(std::ostream& os, const metrics_report& r)
{
    for (const auto& p : r.points)
    {
        if (!p.axes.empty())
        {
            os << "[";
            bool first = true;
            for (const auto& [k, v] : p.axes)
            {
                os << (first ? "" : " ") << k << "=" << v;
                first = false;
            }
            os << "]\n";
        }
        for (const auto& [name, m] : p.metrics)
        {
            char line[160];
            std::snprintf(line, sizeof line, "  %-24s %14.6g +- %-12.4g n=%ld\n", name.c_str(), m.mean,
                          m.half_width_95(), m.n);
            os << line;
        }
        if (p.skipped)
            os << "  skipped rounds: " << p.skipped << '\n';
    }
}

bool
all_skipped(const metrics_report& r)
{
    for (const auto& p : r.points)
    {
        const auto it = p.metrics.find("mue_payoff");
        if (it != p.metrics.end() && it->second.n > 0)
            return false;
    }
    return true;
}

int
emit_report(const common_opts& o,
            const metrics_report& report,
            const std::vector<std::vector<round_metrics>>* rounds)
{
    const auto ts = timestamp();
    const fs::path dir(o.out);
    const auto csv = render([&](std::ostream& os) { write_report_csv(os, report); });
    std::vector<fs::path> written;
    written.push_back(write_file(dir, report_file_name(report, ts, ".csv"), csv));
    written.push_back(write_file(dir, report_file_name(report, ts, ".json"),
                                 render([&](std::ostream& os) { write_report_json(os, report); })));
    if (rounds && rounds->size() == 1)
        written.push_back(write_file(dir, report.scenario + "_rounds_" + ts + ".csv",
                                     render([&](std::ostream& os) { write_rounds_csv(os, rounds->front()); })));
    if (o.quiet)
        std::cout << csv;
    else
    {
        print_table(std::cout, report);
        for (const auto& p : written)
            std::cerr << "wrote " << p.string() << '\n';
    }
    if (all_skipped(report))
    {
        std::cerr << "error: subchannel assignment infeasible in every round\n";
        return exit_infeasible;
    }
    return exit_ok;
}

int
cmd_run(const common_opts& o)
{
    auto cfg = load(o);
    cfg.axes.clear();
    std::vector<std::vector<round_metrics>> rounds;
    const auto report = sweep(cfg, &rounds);
    return emit_report(o, report, &rounds);
}

int
cmd_sweep(const common_opts& o)
{
    const auto cfg = load(o);
    if (cfg.axes.empty())
        throw config_error("sweep", "sweep needs at least one axis under 'sweep'");
    return emit_report(o, sweep(cfg), nullptr);
}

nlohmann::json
partition_json(const outcome& x)
{
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : x.part.coalitions)
        if (c.cooperative())
            cs.push_back({{"fue", c.relay_fue}, {"mues", c.mue_ids}});
    return {{"coalitions", cs}, {"payoffs", payoff_values(x)}};
}

int
cmd_oracle_check(const common_opts& o, int instances, int max_players)
{
    if (max_players > 8)
    {
        std::cerr << "error: --max-players " << max_players << " refused, the exhaustive search is capped at 8\n";
        return exit_config;
    }
    const auto cfg = load(o);
    const int players = cfg.n_faps * cfg.fues_per_fap + cfg.n_mues;
    if (players > max_players)
    {
        std::cerr << "error: instances have " << players << " players, above --max-players " << max_players << '\n';
        return exit_config;
    }

    int stable = 0, undominated = 0, member = 0, empty_core = 0, skipped = 0;
    accumulator shortfall;
    double worst = 0.0;
    const fs::path dir(o.out);
    for (int i = 0; i < instances; ++i)
    {
        const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i), stream_tag::instance);
        network_topology topo;
        try
        {
            topo = make_round_topology(cfg, round_seed(seed, 0));
        }
        catch (const infeasible_assignment&)
        {
            ++skipped;
            continue;
        }
        const channel_model ch(topo, cfg.channel, derive_seed(round_seed(seed, 0), 0, stream_tag::shadowing));
        const game_model g(topo, ch, cfg);
        const auto formed = form_coalitions(g);
        const auto core = recursive_core_oracle(g, max_players);
        const auto st = is_stable(g, formed.result.part);
        const auto dev = check_small_deviations(g, formed.result);
        const auto match = match_core(formed.result, core);
        stable += st.stable;
        undominated += dev.stable;
        member += match.member;
        empty_core += core.core.empty();
        shortfall.add(match.shortfall);
        worst = std::max(worst, match.shortfall);

        if (st.stable && dev.stable && match.member)
            continue;
        nlohmann::json dump;
        dump["instance"] = i;
        dump["seed"] = seed;
        dump["replay"] = "femtocoop run --config " + o.config + " --seed " + std::to_string(seed) + " --rounds 1";
        dump["stable"] = st.stable;
        if (!st.stable)
            dump["instability"] = {{"kind", st.kind}, {"mue", st.mue}, {"fue", st.fue}};
        dump["undominated"] = dev.stable;
        if (!dev.stable)
            dump["deviation"] = {{"kind", dev.kind}, {"mue", dev.mue}, {"fue", dev.fue}};
        dump["core_member"] = match.member;
        dump["shortfall"] = match.shortfall;
        dump["formed"] = partition_json(formed.result);
        dump["core"] = nlohmann::json::array();
        for (const auto& c : core.core)
            dump["core"].push_back(partition_json(c));
        write_file(dir, "counterexample_" + std::to_string(i) + ".json", dump.dump(2) + "\n");
    }

    const int n = instances - skipped;
    auto pct = [&](int k) { return n > 0 ? 100.0 * k / n : 0.0; };
    const auto sf = shortfall.summary();
    std::ostringstream csv;
    csv << "metric,value\n"
        << "instances," << n << "\n"
        << "skipped," << skipped << "\n"
        << "stable_pct," << pct(stable) << "\n"
        << "undominated_pct," << pct(undominated) << "\n"
        << "core_member_pct," << pct(member) << "\n"
        << "empty_core," << empty_core << "\n"
        << "mean_shortfall," << sf.mean << "\n"
        << "max_shortfall," << worst << "\n";
    const auto path = write_file(dir, cfg.scenario + "_oracle_" + timestamp() + ".csv", csv.str());
    std::cout << csv.str();
    if (!o.quiet)
        std::cerr << "wrote " << path.string() << '\n';
    return exit_ok;
}

int
cmd_validate(const std::string& path)
{
    const auto cfg = load_config(path);
    std::cout << "ok: " << cfg.scenario << " (N=" << cfg.n_faps << ", M=" << cfg.n_mues << ")\n";
    return exit_ok;
}

int
cmd_report(const std::string& in)
{
    std::ifstream f(in);
    if (!f)
        throw std::runtime_error("cannot read " + in);
    const auto j = nlohmann::json::parse(f);
    metrics_report r;
    r.scenario = j.at("scenario").get<std::string>();
    r.axis_names = j.at("axes").get<std::vector<std::string>>();
    for (const auto& jp : j.at("points"))
    {
        sweep_point p;
        p.axes = jp.at("axes").get<std::map<std::string, double>>();
        p.skipped = jp.value("skipped", 0);
        for (const auto& [name, m] : jp.at("metrics").items())
            p.metrics[name] = {m.at("mean").get<double>(), m.at("stderr").get<double>(), m.at("n").get<long>()};
        r.points.push_back(std::move(p));
    }
    std::cout << r.scenario << '\n';
    print_table(std::cout, r);
    return exit_ok;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Femtocell/macrocell spectrum-leasing cooperation simulator"};
    app.require_subcommand(1, 1);

    common_opts run_opts, sweep_opts, oracle_opts;
    auto* run = app.add_subcommand("run", "simulate the base scenario");
    add_common(run, run_opts);
    auto* sw = app.add_subcommand("sweep", "simulate every point of the configured sweep axes");
    add_common(sw, sweep_opts);
    auto* oc = app.add_subcommand("oracle-check", "compare formation with the exhaustive core on small instances");
    add_common(oc, oracle_opts);
    int instances = 100;
    int max_players = 8;
    oc->add_option("--instances", instances, "random instances")->capture_default_str();
    oc->add_option("--max-players", max_players, "player cap, at most 8")->capture_default_str();
    auto* vc = app.add_subcommand("validate-config", "parse and range-check a config");
    std::string validate_path;
    vc->add_option("--config", validate_path, "scenario YAML file")->required();
    auto* rep = app.add_subcommand("report", "print a sweep JSON report as a table");
    std::string report_in;
    rep->add_option("--in", report_in, "report JSON")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*run)
            return cmd_run(run_opts);
        if (*sw)
            return cmd_sweep(sweep_opts);
        if (*oc)
            return cmd_oracle_check(oracle_opts, instances, max_players);
        if (*vc)
            return cmd_validate(validate_path);
        if (*rep)
            return cmd_report(report_in);
    }
    catch (const config_error& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const YAML::Exception& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const infeasible_assignment& e)
    {
        std::cerr << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    }
    catch (const oracle_refused& e)
    {
        std::cerr << "refused: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_other;
    }
    return exit_other;
}
