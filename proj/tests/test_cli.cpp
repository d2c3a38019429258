/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct result
{
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path work = fs::path(FEMTOCOOP_TEST_WORKDIR) / "cli";

std::string
slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

result
cli(const std::string& args)
{
    fs::create_directories(work);
    const auto err = work / "stderr.txt";
    const std::string cmd = "cd '" + work.string() + "' && '" FEMTOCOOP_CLI "' " + args + " 2>'" + err.string() + "'";
    result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0)
        r.out.append(buf.data(), n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

fs::path
write_config(const std::string& name, const std::string& body)
{
    fs::create_directories(work);
    const auto p = work / name;
    std::ofstream(p) << body;
    return p;
}

// csv files in `dir` keyed by name with the timestamp stripped
std::map<std::string, std::string>
csv_files(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
    {
        if (e.path().extension() != ".csv")
            continue;
        auto name = e.path().stem().string();
        name = name.substr(0, name.rfind('_'));
        out[name] = slurp(e.path());
    }
    return out;
}

std::map<std::string, std::string>
parse_summary(const std::string& csv)
{
    std::map<std::string, std::string> kv;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (const auto c = line.find(','); c != std::string::npos)
            kv[line.substr(0, c)] = line.substr(c + 1);
    return kv;
}

const std::string configs = FEMTOCOOP_SOURCE_DIR "/configs/";

} // namespace

TEST_CASE("validate-config")
{
    for (const char* name : {"default", "minimal", "m_sweep", "delta_sweep", "radius_sweep", "mobility", "oracle"})
    {
        const auto r = cli("validate-config --config " + configs + name + ".yaml");
        CHECK_MESSAGE(r.code == 0, name, r.err);
    }
}

TEST_CASE("run writes metrics")
{
    fs::remove_all(work / "run");
    const auto r = cli("run --config " + configs + "minimal.yaml --out run --quiet");
    REQUIRE(r.code == 0);
    const auto files = csv_files(work / "run");
    CHECK(files.count("minimal_point") == 1);
    CHECK(files.count("minimal_rounds") == 1);
    CHECK(r.out == files.at("minimal_point"));
    bool json = false;
    for (const auto& e : fs::directory_iterator(work / "run"))
        json = json || e.path().extension() == ".json";
    CHECK(json);
}

TEST_CASE("missing key exits 2 and names it")
{
    const auto p = write_config("no_n.yaml", "M: 4\n");
    const auto r = cli("run --config " + p.string() + " --out bad");
    CHECK(r.code == 2);
    CHECK(r.err.find("'N'") != std::string::npos);
    CHECK(r.err.find("line") != std::string::npos);
}

TEST_CASE("bad flags and policies exit 2")
{
    CHECK(cli("run").code == 2);
    CHECK(cli("run --config " + configs + "minimal.yaml --policy hybrid --out bad").code == 2);
    CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("infeasible scenario exits 3")
{
    const auto p = write_config("crowded.yaml", R"(
N: 30
M: 2
n_subchannels: 2
femto_radius: 50
macro_radius: 100
macro_exclusion: 10
experiment:
  rounds: 2
)");
    const auto r = cli("run --config " + p.string() + " --out crowded --quiet");
    CHECK(r.code == 3);
}

TEST_CASE("same seed, same bytes, any job count")
{
    fs::remove_all(work / "s1");
    fs::remove_all(work / "s2");
    fs::remove_all(work / "s3");
    REQUIRE(cli("run --config " + configs + "minimal.yaml --seed 42 --out s1 --quiet").code == 0);
    REQUIRE(cli("run --config " + configs + "minimal.yaml --seed 42 --out s2 --quiet").code == 0);
    REQUIRE(cli("run --config " + configs + "minimal.yaml --seed 42 --out s3 --quiet --jobs 3").code == 0);
    const auto a = csv_files(work / "s1");
    CHECK(a.size() == 2);
    CHECK(a == csv_files(work / "s2"));
    CHECK(a == csv_files(work / "s3"));
}

TEST_CASE("sweep and report")
{
    fs::remove_all(work / "sw");
    const auto p = write_config("sw.yaml", R"(
scenario: sw
N: 10
M: 10
experiment:
  rounds: 2
sweep:
  delta: [0.2, 0.8]
)");
    const auto r = cli("sweep --config " + p.string() + " --out sw --quiet");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("delta,metric,mean,stderr,n\n", 0) == 0);
    fs::path json;
    for (const auto& e : fs::directory_iterator(work / "sw"))
        if (e.path().extension() == ".json")
            json = e.path();
    REQUIRE(!json.empty());
    CHECK(json.filename().string().rfind("sw_delta_", 0) == 0);
    const auto rep = cli("report --in " + json.string());
    CHECK(rep.code == 0);
    CHECK(rep.out.find("delta=0.2") != std::string::npos);

    const auto none = write_config("flat.yaml", "N: 2\nM: 2\n");
    CHECK(cli("sweep --config " + none.string() + " --out sw").code == 2);
}

TEST_CASE("oracle-check")
{
    SUBCASE("cap above 8 is refused")
    {
        CHECK(cli("oracle-check --config " + configs + "oracle.yaml --max-players 9 --out oc").code == 2);
        CHECK(cli("oracle-check --config " + configs + "oracle.yaml --max-players 4 --out oc").code == 2);
    }
    SUBCASE("single players always agree")
    {
        const auto p = write_config("one.yaml", "scenario: one\nN: 1\nM: 0\n");
        const auto r = cli("oracle-check --config " + p.string() + " --instances 20 --out one --quiet");
        REQUIRE(r.code == 0);
        const auto kv = parse_summary(r.out);
        CHECK(kv.at("stable_pct") == "100");
        CHECK(kv.at("core_member_pct") == "100");
    }
    SUBCASE("small instances, counterexamples replay")
    {
        fs::remove_all(work / "oc");
        const auto r = cli("oracle-check --config " + configs + "oracle.yaml --instances 40 --out oc --quiet");
        REQUIRE(r.code == 0);
        const auto kv = parse_summary(r.out);
        CHECK(std::stod(kv.at("stable_pct")) >= 90.0);
        CHECK(std::stod(kv.at("core_member_pct")) >= 85.0);
        CHECK(std::stod(kv.at("mean_shortfall")) <= 0.05);

        int dumps = 0;
        for (const auto& e : fs::directory_iterator(work / "oc"))
        {
            if (e.path().filename().string().rfind("counterexample_", 0) != 0)
                continue;
            ++dumps;
            const auto j = nlohmann::json::parse(slurp(e.path()));
            auto replay = j.at("replay").get<std::string>();
            replay = replay.substr(replay.find(' ') + 1);
            const auto rr = cli(replay + " --out replay --quiet");
            CHECK(rr.code == 0);
        }
        CHECK(dumps > 0);
    }
}
