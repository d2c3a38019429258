/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "femtocoop/error.hpp"
#include "femtocoop/rng.hpp"
#include "femtocoop/traffic.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace femtocoop;
namespace ref = femtocoop::oracle_ref;

TEST_CASE("shannon rate")
{
    CHECK(shannon_rate(180e3, 1.0) == doctest::Approx(180000.0).epsilon(1e-15));
    CHECK(shannon_rate(180e3, 0.0) == 0.0);
    CHECK(shannon_rate(180e3, 15.0) == doctest::Approx(720000.0).epsilon(1e-15));
}

TEST_CASE("effective arrival")
{
    CHECK(effective_arrival(150e3, 1.0, 4) == 150e3);
    CHECK(effective_arrival(150e3, 0.0, 4) == 0.0);
    CHECK(effective_arrival(150000.0, 0.5, 4) == doctest::Approx(140625.0).epsilon(1e-15));

    SUBCASE("expected transmissions counts every attempt")
    {
        // Pt = 0.5, D = 2: 1*0.5 + 2*0.25 + 2*0.25
        CHECK(effective_arrival(100.0, 0.5, 2, arrival_mode::expected_transmissions) ==
              doctest::Approx(150.0).epsilon(1e-12));
        CHECK(effective_arrival(100.0, 0.0, 3, arrival_mode::expected_transmissions) == 300.0);
        CHECK(effective_arrival(100.0, 1.0, 3, arrival_mode::expected_transmissions) == 100.0);
    }
    SUBCASE("literal mode never inflates the load")
    {
        rng_stream rng(1);
        for (int i = 0; i < 500; ++i)
        {
            const double lam = rng.uniform(0.0, 1e6), pt = rng.uniform();
            const int d = 1 + static_cast<int>(rng.below(8));
            const double a = effective_arrival(lam, pt, d);
            CHECK(a <= lam);
            CHECK(a == doctest::Approx(ref::arrival(lam, pt, d)).epsilon(1e-12));
        }
    }
}

TEST_CASE("M/D/1 delay")
{
    CHECK(md1_delay({0.0, 5.0}) == 0.0);
    CHECK(std::isinf(md1_delay({5.0, 5.0})));
    CHECK(std::isinf(md1_delay({6.0, 5.0})));
    CHECK(md1_delay({1.0, 2.0}) == 0.25);
    CHECK_THROWS_AS(md1_delay({1.0, 0.0}), std::domain_error);
}

TEST_CASE("M/D/1 delay matches a discrete-event queue")
{
    constexpr double size = 1000.0; // bits per packet
    for (double rho : {0.1, 0.5, 0.8})
    {
        const double sim = ref::md1_simulated_wait(rho, 200000, 17);
        const double formula = md1_delay({rho * size, size}) * size;
        CHECK(std::abs(sim - formula) / formula < 0.10);
    }
}

TEST_CASE("power payoff")
{
    CHECK(power_payoff(4.0, 1.0, 0.5).value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(power_payoff(9.0, 4.0, 0.5).value == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(power_payoff(9.0, infinite_delay, 0.5).value == 0.0);
    CHECK_THROWS_AS(power_payoff(9.0, 0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(power_payoff(9.0, 1.0, 1.0), std::domain_error);

    rng_stream rng(4);
    for (int i = 0; i < 200; ++i)
    {
        const double mu = rng.uniform(1.0, 1e6), d = rng.uniform(1e-6, 1.0), delta = rng.uniform(0.05, 0.95);
        const double v = power_payoff(mu, d, delta).value;
        CHECK(power_payoff(mu * 1.01, d, delta).value > v);
        CHECK(power_payoff(mu, d * 1.01, delta).value < v);
    }
}

TEST_CASE("relay rates")
{
    const double x = 1e6;
    lease_terms half{0.5, 0.5, 0.05, 0.05};
    std::vector<relay_member_link> one{{x, x, x, half}};
    const auto r = relay_rates(one, 0.0, 0.1);
    CHECK(r.mue_rates[0] == doctest::Approx(0.25 * x));
    CHECK(r.fue_rate == doctest::Approx(0.25 * x));

    SUBCASE("beta = 1 leaves no own slice")
    {
        std::vector<relay_member_link> full{{x, x, x, {0.5, 1.0, 0.09, 0.0}}};
        CHECK(relay_rates(full, 7.0, 0.1).fue_rate == 7.0);
    }
    SUBCASE("power budget is enforced")
    {
        std::vector<relay_member_link> bad{{x, x, x, {0.5, 0.5, 0.2, 0.1}}};
        CHECK_THROWS_AS(relay_rates(bad, 0.0, 0.1), infeasible_lease);
    }
    SUBCASE("min structure and monotonicity in beta")
    {
        rng_stream rng(8);
        for (int i = 0; i < 300; ++i)
        {
            const double a = rng.uniform(0.01, 1.0), b = rng.uniform(0.01, 0.99);
            const double mr = rng.uniform(1e3, 1e6), lr = rng.uniform(1e3, 1e6);
            std::vector<relay_member_link> m{{mr, lr, lr, {a, b, 0.05, 0.05}}};
            const double c = relay_rates(m, 0.0, 0.1).mue_rates[0];
            const double first = (1.0 - a) * mr, second = a * b * lr;
            CHECK(c <= first);
            CHECK(c <= second);
            CHECK((c == first || c == second));
            m[0].terms.beta = std::min(1.0, b + 0.01);
            CHECK(relay_rates(m, 0.0, 0.1).mue_rates[0] >= c);
        }
    }
}

TEST_CASE("relay arrival")
{
    CHECK(relay_arrival(150e3, {}, 0.9, 4) == doctest::Approx(150e3 * (1.0 - 1e-4)).epsilon(1e-15));
    const std::vector<double> one{140625.0};
    CHECK(relay_arrival(150e3, one, 1.0, 4) == 290625.0);
    // frozen: 290625 * (1 - 0.1^4)
    CHECK(relay_arrival(150e3, one, 0.9, 4) == doctest::Approx(290595.9375).epsilon(1e-14));
}

TEST_CASE("two-hop delay")
{
    CHECK(coop_delay(0.0, 10.0, 1.0, 2.0) == 0.25);
    CHECK(std::isinf(coop_delay(10.0, 10.0, 1.0, 2.0)));
    CHECK(std::isinf(coop_delay(1.0, 10.0, 2.0, 2.0)));
    CHECK(coop_delay(3.0, 10.0, 1.0, 2.0) == doctest::Approx(md1_delay({3.0, 10.0}) + md1_delay({1.0, 2.0})));
}

TEST_CASE("coalition value")
{
    const std::vector<double> single{4.0}, pair{2.0, 3.0};
    CHECK(coalition_value(single, false) == 0.0);
    CHECK(coalition_value(pair, true) == 5.0);
    CHECK(coalition_value(pair, false) == 0.0);
}

TEST_CASE("power budget predicate")
{
    CHECK(satisfies_power_budget({0.5, 0.5, 0.1, 0.0999}, 0.1));
    CHECK_FALSE(satisfies_power_budget({0.5, 0.5, 0.1, 0.1}, 0.1));
    CHECK_FALSE(satisfies_power_budget({0.0, 0.5, 0.01, 0.01}, 0.1));
    CHECK_FALSE(satisfies_power_budget({0.5, 1.5, 0.01, 0.01}, 0.1));
}
