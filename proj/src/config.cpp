/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/config.hpp"

#include "femtocoop/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace femtocoop {

double
scenario_config::p_max_w() const
{
    return dbm_to_w(p_max_dbm);
}

double
scenario_config::gamma_mue() const
{
    return db_to_linear(gamma_mue_db);
}

double
scenario_config::gamma_fue() const
{
    return db_to_linear(gamma_fue_db);
}

std::string
to_string(access_policy p)
{
    switch (p)
    {
    case access_policy::closed:
        return "closed";
    case access_policy::open:
        return "open";
    case access_policy::cooperative:
        return "coop";
    case access_policy::noncooperative:
        return "noncoop";
    }
    return "?";
}

access_policy
parse_policy(const std::string& s)
{
    if (s == "closed")
        return access_policy::closed;
    if (s == "open")
        return access_policy::open;
    if (s == "coop" || s == "cooperative")
        return access_policy::cooperative;
    if (s == "noncoop" || s == "noncooperative")
        return access_policy::noncooperative;
    throw config_error("policy", "unknown access policy '" + s + "'");
}

namespace {

using setter = std::function<void(scenario_config&, const YAML::Node&)>;

struct key_spec
{
    std::string path;
    bool required;
    setter set;
};

int
line_of(const YAML::Node& n)
{
    const auto mark = n.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

template <typename T>
T
scalar(const YAML::Node& n, const std::string& path)
{
    try
    {
        return n.as<T>();
    }
    catch (const YAML::Exception&)
    {
        throw config_error(path,
                           "line " + std::to_string(line_of(n)) + ": key '" + path +
                               "' has an invalid value",
                           line_of(n));
    }
}

template <typename T, typename Member>
key_spec
field(std::string path, Member member, bool required = false)
{
    return key_spec{path, required, [member, path](scenario_config& c, const YAML::Node& n) {
                        c.*member = scalar<T>(n, path);
                    }};
}

template <typename T, typename Member>
key_spec
channel_field(std::string path, Member member)
{
    return key_spec{path, false, [member, path](scenario_config& c, const YAML::Node& n) {
                        c.channel.*member = scalar<T>(n, path);
                    }};
}

template <typename Enum>
key_spec
enum_field(std::string path,
           Enum scenario_config::*member,
           std::vector<std::pair<std::string, Enum>> names)
{
    return key_spec{path, false, [member, path, names](scenario_config& c, const YAML::Node& n) {
                        const auto s = scalar<std::string>(n, path);
                        for (const auto& [name, value] : names)
                        {
                            if (name == s)
                            {
                                c.*member = value;
                                return;
                            }
                        }
                        throw config_error(path,
                                           "line " + std::to_string(line_of(n)) + ": key '" +
                                               path + "' has unknown value '" + s + "'",
                                           line_of(n));
                    }};
}

const std::vector<key_spec>&
schema()
{
    static const std::vector<key_spec> keys = [] {
        std::vector<key_spec> k;
        k.push_back(field<std::string>("scenario", &scenario_config::scenario));
        k.push_back(field<int>("N", &scenario_config::n_faps, true));
        k.push_back(field<int>("M", &scenario_config::n_mues, true));
        k.push_back(field<int>("L_n", &scenario_config::fues_per_fap));
        k.push_back(field<double>("macro_radius", &scenario_config::macro_radius));
        k.push_back(field<double>("macro_exclusion", &scenario_config::macro_exclusion));
        k.push_back(field<double>("femto_radius", &scenario_config::femto_radius));
        k.push_back(field<double>("femto_exclusion", &scenario_config::femto_exclusion));
        k.push_back(field<int>("n_subchannels", &scenario_config::n_subchannels));
        k.push_back(field<double>("sensing_factor", &scenario_config::sensing_factor));
        k.push_back(enum_field<layout_mode>(
            "layout",
            &scenario_config::layout,
            {{"uniform", layout_mode::uniform}, {"cluster", layout_mode::cluster}}));
        k.push_back(field<double>("cluster_radius", &scenario_config::cluster_radius));

        k.push_back(field<double>("traffic.lambda_m", &scenario_config::mue_arrival));
        k.push_back(field<double>("traffic.lambda_l", &scenario_config::fue_arrival));
        k.push_back(field<int>("traffic.D", &scenario_config::max_transmissions));
        k.push_back(field<double>("traffic.gamma_m_db", &scenario_config::gamma_mue_db));
        k.push_back(field<double>("traffic.gamma_l_db", &scenario_config::gamma_fue_db));
        k.push_back(field<int>("traffic.packet_size_bits", &scenario_config::packet_size_bits));
        k.push_back(enum_field<arrival_mode>(
            "traffic.arrival_mode",
            &scenario_config::arrivals,
            {{"literal", arrival_mode::literal},
             {"expected_transmissions", arrival_mode::expected_transmissions}}));
        k.push_back(enum_field<relay_service_mode>(
            "traffic.relay_service",
            &scenario_config::relay_service,
            {{"relay_slice", relay_service_mode::relay_slice},
             {"fue_own_rate", relay_service_mode::fue_own_rate}}));

        k.push_back(field<double>("radio.p_max_dbm", &scenario_config::p_max_dbm));
        k.push_back(
            field<bool>("radio.path_loss_compensation", &scenario_config::path_loss_compensation));
        k.push_back(field<double>("radio.compensation_target_dbm",
                                  &scenario_config::compensation_target_dbm));
        k.push_back(field<double>("radio.d2d_target_snr_db", &scenario_config::d2d_target_snr_db));
        k.push_back(field<double>("radio.d2d_range", &scenario_config::d2d_range));

        k.push_back(channel_field<double>("channel.indoor_intercept_db",
                                          &channel_params::indoor_intercept_db));
        k.push_back(
            channel_field<double>("channel.indoor_slope_db", &channel_params::indoor_slope_db));
        k.push_back(channel_field<double>("channel.outdoor_intercept_db",
                                          &channel_params::outdoor_intercept_db));
        k.push_back(
            channel_field<double>("channel.outdoor_slope_db", &channel_params::outdoor_slope_db));
        k.push_back(channel_field<double>("channel.wall_loss_db", &channel_params::wall_loss_db));
        k.push_back(
            channel_field<double>("channel.shadow_sigma_db", &channel_params::shadow_sigma_db));
        k.push_back(channel_field<double>("channel.noise_density_dbm_hz",
                                          &channel_params::noise_density_dbm_hz));
        k.push_back(channel_field<double>("channel.bandwidth_hz", &channel_params::bandwidth_hz));
        k.push_back(channel_field<int>("channel.n_fading_draws", &channel_params::n_fading_draws));
        k.push_back(
            channel_field<bool>("channel.fade_interferers", &channel_params::fade_interferers));
        k.push_back(
            channel_field<double>("channel.min_distance_m", &channel_params::min_distance_m));
        k.push_back(key_spec{"channel.fading", false, [](scenario_config& c, const YAML::Node& n) {
                                 const auto s = scalar<std::string>(n, "channel.fading");
                                 if (s == "closed_form")
                                     c.channel.fading = fading_mode::closed_form;
                                 else if (s == "monte_carlo")
                                     c.channel.fading = fading_mode::monte_carlo;
                                 else
                                     throw config_error("channel.fading",
                                                        "line " + std::to_string(line_of(n)) +
                                                            ": unknown fading mode '" + s + "'",
                                                        line_of(n));
                             }});

        k.push_back(field<double>("game.delta", &scenario_config::delta));
        k.push_back(field<int>("game.max_coalition_size", &scenario_config::max_coalition_size));
        k.push_back(field<int>("game.revisit_limit", &scenario_config::revisit_limit));

        k.push_back(field<double>("lease.alpha_step", &scenario_config::alpha_step));
        k.push_back(field<double>("lease.beta_step", &scenario_config::beta_step));
        k.push_back(field<int>("lease.power_points", &scenario_config::power_points));
        k.push_back(enum_field<lease_objective>(
            "lease.objective",
            &scenario_config::objective,
            {{"fue", lease_objective::fue_payoff}, {"nash", lease_objective::nash_bargaining}}));

        auto policy_setter = [](access_policy scenario_config::*member, std::string path) {
            return key_spec{path, false, [member, path](scenario_config& c, const YAML::Node& n) {
                                try
                                {
                                    c.*member = parse_policy(scalar<std::string>(n, path));
                                }
                                catch (const config_error& e)
                                {
                                    throw config_error(path,
                                                       "line " + std::to_string(line_of(n)) +
                                                           ": " + e.what(),
                                                       line_of(n));
                                }
                            }};
        };
        k.push_back(policy_setter(&scenario_config::policy, "experiment.policy"));
        k.push_back(policy_setter(&scenario_config::baseline, "experiment.baseline"));
        k.push_back(field<int>("experiment.rounds", &scenario_config::rounds));
        k.push_back(field<std::uint64_t>("experiment.seed", &scenario_config::seed));
        k.push_back(field<int>("experiment.jobs", &scenario_config::jobs));
        k.push_back(field<int>("experiment.cdf_knots", &scenario_config::cdf_knots));
        k.push_back(field<double>("experiment.path_fap_x", &scenario_config::path_fap_x));
        return k;
    }();
    return keys;
}

const std::set<std::string>&
axis_names()
{
    static const std::set<std::string> names{"M", "N", "delta", "r", "mue_path"};
    return names;
}

void
flatten(const YAML::Node& node, const std::string& prefix, std::map<std::string, YAML::Node>& out)
{
    for (const auto& kv : node)
    {
        const auto key = kv.first.as<std::string>();
        const auto path = prefix.empty() ? key : prefix + "." + key;
        if (path == "sweep")
        {
            out.emplace(path, kv.second);
            continue;
        }
        if (kv.second.IsMap())
            flatten(kv.second, path, out);
        else
            out.emplace(path, kv.second);
    }
}

std::string
env_name(const std::string& path)
{
    std::string s = "FEMTOCOOP_";
    for (char c : path)
        s.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return s;
}

void
check(bool ok, const std::string& key, const std::string& what)
{
    if (!ok)
        throw config_error(key, "key '" + key + "': " + what);
}

} // namespace

void
validate(const scenario_config& c)
{
    check(c.n_faps >= 0, "N", "must be >= 0");
    check(c.n_mues >= 0, "M", "must be >= 0");
    check(c.n_faps + c.n_mues > 0, "N", "N + M must be positive");
    check(c.fues_per_fap >= 1, "L_n", "must be >= 1");
    check(c.macro_radius > c.macro_exclusion && c.macro_exclusion >= 0.0,
          "macro_radius",
          "must exceed macro_exclusion >= 0");
    check(c.femto_radius > c.femto_exclusion && c.femto_exclusion >= 0.0,
          "femto_radius",
          "must exceed femto_exclusion >= 0");
    check(c.n_subchannels >= c.n_mues, "n_subchannels", "must be >= M");
    check(c.n_subchannels >= 1, "n_subchannels", "must be positive");
    check(c.sensing_factor >= 0.0, "sensing_factor", "must be >= 0");
    check(c.cluster_radius > 0.0 && c.cluster_radius < c.macro_radius - c.macro_exclusion,
          "cluster_radius",
          "must be positive and fit inside the macro annulus");
    check(c.mue_arrival > 0.0 && c.fue_arrival > 0.0, "traffic.lambda_m", "arrivals must be > 0");
    check(c.max_transmissions >= 1, "traffic.D", "must be >= 1");
    check(c.delta > 0.0 && c.delta < 1.0, "game.delta", "must lie in (0, 1)");
    check(c.max_coalition_size >= 1, "game.max_coalition_size", "must be >= 1");
    check(c.revisit_limit >= 1, "game.revisit_limit", "must be >= 1");
    check(c.d2d_range >= 0.0, "radio.d2d_range", "must be >= 0");
    check(c.alpha_step > 0.0 && c.alpha_step <= 1.0, "lease.alpha_step", "must lie in (0, 1]");
    check(c.beta_step > 0.0 && c.beta_step <= 1.0, "lease.beta_step", "must lie in (0, 1]");
    check(c.power_points >= 1, "lease.power_points", "must be >= 1");
    check(c.rounds >= 1, "experiment.rounds", "must be >= 1");
    check(c.jobs >= 1, "experiment.jobs", "must be >= 1");
    check(c.cdf_knots >= 2, "experiment.cdf_knots", "must be >= 2");
    check(c.packet_size_bits >= 1, "traffic.packet_size_bits", "must be >= 1");
    check(c.channel.bandwidth_hz > 0.0, "channel.bandwidth_hz", "must be > 0");
    check(c.channel.shadow_sigma_db >= 0.0, "channel.shadow_sigma_db", "must be >= 0");
    check(c.channel.min_distance_m > 0.0, "channel.min_distance_m", "must be > 0");
    check(c.channel.fading == fading_mode::closed_form || c.channel.n_fading_draws >= 100,
          "channel.n_fading_draws",
          "must be >= 100 in monte_carlo mode");
    for (const auto& [name, values] : c.axes)
    {
        check(axis_names().count(name) == 1, "sweep." + name, "unknown sweep axis");
        check(!values.empty(), "sweep." + name, "axis must not be empty");
    }
}

scenario_config
parse_config(const std::string& text)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        throw config_error("", "line " + std::to_string(e.mark.line + 1) + ": " + e.msg,
                           e.mark.line + 1);
    }
    if (!root.IsMap())
        throw config_error("", "line 1: config must be a key-value mapping", 1);

    std::map<std::string, YAML::Node> flat;
    flatten(root, "", flat);

    scenario_config cfg;
    std::set<std::string> known;
    for (const auto& spec : schema())
        known.insert(spec.path);
    for (const auto& [path, node] : flat)
    {
        if (path != "sweep" && known.count(path) == 0)
            throw config_error(path,
                               "line " + std::to_string(line_of(node)) + ": unknown key '" +
                                   path + "'",
                               line_of(node));
    }

    for (const auto& spec : schema())
    {
        if (const char* env = std::getenv(env_name(spec.path).c_str()))
        {
            spec.set(cfg, YAML::Load(env));
            continue;
        }
        auto it = flat.find(spec.path);
        if (it == flat.end())
        {
            if (spec.required)
                throw config_error(spec.path,
                                   "line 1: missing required key '" + spec.path + "'",
                                   1);
            continue;
        }
        spec.set(cfg, it->second);
    }

    if (auto it = flat.find("sweep"); it != flat.end())
    {
        const auto& sweep = it->second;
        if (!sweep.IsMap())
            throw config_error("sweep",
                               "line " + std::to_string(line_of(sweep)) +
                                   ": 'sweep' must map axis names to value lists",
                               line_of(sweep));
        for (const auto& kv : sweep)
        {
            const auto name = kv.first.as<std::string>();
            const auto path = "sweep." + name;
            if (axis_names().count(name) == 0)
                throw config_error(path,
                                   "line " + std::to_string(line_of(kv.first)) +
                                       ": unknown sweep axis '" + name + "'",
                                   line_of(kv.first));
            if (!kv.second.IsSequence() || kv.second.size() == 0)
                throw config_error(path,
                                   "line " + std::to_string(line_of(kv.second)) + ": axis '" +
                                       name + "' needs a non-empty list",
                                   line_of(kv.second));
            std::vector<double> values;
            for (const auto& v : kv.second)
                values.push_back(scalar<double>(v, path));
            cfg.axes[name] = std::move(values);
        }
    }

    validate(cfg);
    return cfg;
}

scenario_config
load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("", "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace femtocoop
