/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/config.hpp"
#include "femtocoop/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>

using namespace femtocoop;

TEST_CASE("defaults follow the system parameter table")
{
    const auto c = parse_config("N: 5\nM: 5\n");
    CHECK(c.mue_arrival == 150e3);
    CHECK(c.fue_arrival == 150e3);
    CHECK(c.max_transmissions == 4);
    CHECK(c.gamma_mue_db == 10.0);
    CHECK(c.gamma_fue_db == 15.0);
    CHECK(c.p_max_w() == doctest::Approx(0.1));
    CHECK(c.femto_radius == 20.0);
    CHECK(c.n_subchannels == 500);
    CHECK(c.channel.wall_loss_db == 12.0);
    CHECK(c.channel.shadow_sigma_db == 10.0);
}

TEST_CASE("nested keys, enums and sweep axes")
{
    const auto c = parse_config(R"(
scenario: s
N: 3
M: 4
game:
  delta: 0.2
traffic:
  arrival_mode: expected_transmissions
experiment:
  policy: open
  rounds: 7
sweep:
  M: [10, 20]
  delta: [0.2, 0.8]
)");
    CHECK(c.scenario == "s");
    CHECK(c.delta == 0.2);
    CHECK(c.arrivals == arrival_mode::expected_transmissions);
    CHECK(c.policy == access_policy::open);
    CHECK(c.rounds == 7);
    CHECK(c.axes.at("M") == std::vector<double>{10, 20});
    CHECK(c.axes.at("delta") == std::vector<double>{0.2, 0.8});
}

TEST_CASE("errors name the key and the line")
{
    try
    {
        parse_config("M: 5\n");
        FAIL("missing N accepted");
    }
    catch (const config_error& e)
    {
        CHECK(e.key() == "N");
        CHECK(std::string(e.what()).find("'N'") != std::string::npos);
    }
    try
    {
        parse_config("N: 1\nM: 1\n\nbogus: 3\n");
        FAIL("unknown key accepted");
    }
    catch (const config_error& e)
    {
        CHECK(e.key() == "bogus");
        CHECK(e.line() == 4);
    }
    try
    {
        parse_config("N: 1\nM: 1\ngame:\n  delta: 1.5\n");
        FAIL("delta out of range accepted");
    }
    catch (const config_error& e)
    {
        CHECK(e.key() == "game.delta");
    }
    CHECK_THROWS_AS(parse_config("N: 1\nM: 1\nexperiment:\n  policy: hybrid\n"), config_error);
    CHECK_THROWS_AS(parse_config("N: [1\n"), config_error);
    CHECK_THROWS_AS(parse_config("N: 1\nM: 1\nsweep:\n  K: [1]\n"), config_error);
    CHECK_THROWS_AS(parse_config("N: 1\nM: 1\nsweep:\n  M: []\n"), config_error);
    CHECK_THROWS_AS(parse_config("N: 1\nM: 600\n"), config_error);
    CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), config_error);
}

TEST_CASE("environment overrides")
{
    ::setenv("FEMTOCOOP_GAME_DELTA", "0.8", 1);
    ::setenv("FEMTOCOOP_M", "9", 1);
    const auto c = parse_config("N: 2\nM: 3\ngame:\n  delta: 0.2\n");
    ::unsetenv("FEMTOCOOP_GAME_DELTA");
    ::unsetenv("FEMTOCOOP_M");
    CHECK(c.delta == 0.8);
    CHECK(c.n_mues == 9);
}

TEST_CASE("policy names")
{
    CHECK(parse_policy("coop") == access_policy::cooperative);
    CHECK(parse_policy("noncoop") == access_policy::noncooperative);
    CHECK(parse_policy("closed") == access_policy::closed);
    CHECK(parse_policy(to_string(access_policy::open)) == access_policy::open);
}
