#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "slicenet/common.hpp"
#include "slicenet/utility.hpp"

using namespace slicenet;

TEST_CASE("marginal benefit") {
    CHECK(marginal_utility({10, 2}, 10.0) == 1.0);
    CHECK(marginal_utility({10, 2}, 5.0) == 4.0);
    CHECK(marginal_utility({10, 1}, 20.0) == 0.5);
    CHECK_THROWS_AS(marginal_utility({10, 2}, 0.0), std::domain_error);

    SUBCASE("strictly decreasing") {
        Rng rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            UtilityParams p{rng.uniform(0.5, 50), rng.uniform(0.2, 3)};
            double z1 = rng.uniform(0.01, 100);
            double z2 = z1 * rng.uniform(1.001, 10);
            CHECK(marginal_utility(p, z1) > marginal_utility(p, z2));
        }
    }
}

TEST_CASE("inverse marginal benefit") {
    CHECK(inverse_marginal({10, 2}, 4.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(inverse_marginal({10, 2}, 1.0) == 10.0);
    CHECK(inverse_marginal({20, 1}, 2.0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK_THROWS_AS(inverse_marginal({10, 2}, 0.0), std::domain_error);

    SUBCASE("round trip on a log grid") {
        Rng rng(6);
        for (int trial = 0; trial < 200; ++trial) {
            UtilityParams p{rng.uniform(0.5, 50), rng.uniform(0.25, 3)};
            double y = std::pow(10.0, rng.uniform(-6, 6));
            double z = inverse_marginal(p, y);
            CHECK(marginal_utility(p, z) == doctest::Approx(y).epsilon(1e-12));
        }
    }
}

TEST_CASE("utility value") {
    SUBCASE("zero at the reference point") {
        for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
            UtilityParams p{10, alpha};
            CHECK(utility_value(p, reference_traffic(p)) == doctest::Approx(0.0));
        }
    }
    SUBCASE("logarithmic closed form") {
        UtilityParams p{10, 1};
        CHECK(utility_value(p, 2.0 * reference_traffic(p)) ==
              doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-14));
    }
    SUBCASE("finite differences recover the marginal benefit") {
        for (double alpha : {1.0, 1.3, 2.0}) {
            UtilityParams p{10, alpha};
            double z = 7.0, h = 1e-6;
            double slope = (utility_value(p, z + h) - utility_value(p, z - h)) / (2 * h);
            CHECK(slope == doctest::Approx(marginal_utility(p, z)).epsilon(1e-6));
        }
    }
    SUBCASE("stable in a neighborhood of alpha = 1") {
        UtilityParams near{10, 1.0 + 1e-9}, at{10, 1.0};
        CHECK(utility_value(near, 5.0) == doctest::Approx(utility_value(at, 5.0)).epsilon(1e-7));
    }
    SUBCASE("strict concavity at midpoints") {
        Rng rng(8);
        for (int trial = 0; trial < 200; ++trial) {
            UtilityParams p{rng.uniform(1, 30), rng.uniform(0.3, 2.5)};
            double z1 = rng.uniform(0.05, 40), z2 = rng.uniform(0.05, 40);
            if (z1 == z2) continue;
            double mid = utility_value(p, 0.5 * (z1 + z2));
            double chord = 0.5 * (utility_value(p, z1) + utility_value(p, z2));
            CHECK(mid >= chord);
        }
    }
}

TEST_CASE("delay model") {
    UtilityParams p{10, 1};
    SUBCASE("closed form") {
        Delay d = delay({1.0, 3.0, 0.0}, p, 12.0);
        REQUIRE_FALSE(d.infinite);
        CHECK(d.seconds == doctest::Approx(0.75).epsilon(1e-14));
    }
    SUBCASE("pole at the admitted load") {
        CHECK(delay({1.0, 3.0, 0.0}, p, 10.0).infinite);
        CHECK(delay({1.0, 3.0, 0.0}, p, 5.0).infinite);
    }
    SUBCASE("no processing steps") {
        Delay d = delay({1.0, 0.0, 0.0}, p, 20.0);
        CHECK(d.seconds == doctest::Approx(0.1).epsilon(1e-14));
    }
    SUBCASE("monotone decreasing beyond the load") {
        Rng rng(9);
        for (int trial = 0; trial < 100; ++trial) {
            double x1 = rng.uniform(10.01, 100);
            double x2 = x1 + rng.uniform(0.01, 10);
            Delay d1 = delay({1.0, 3.0, 0.0}, p, x1);
            Delay d2 = delay({1.0, 3.0, 0.0}, p, x2);
            CHECK(d1.seconds > d2.seconds);
        }
    }
}

TEST_CASE("net revenue") {
    UtilityParams p{10, 1};
    SUBCASE("zero weight reduces to the utility") {
        Revenue r = net_revenue(p, {1.0, 3.0, 0.0}, 5.0);
        REQUIRE_FALSE(r.neg_infinite);
        CHECK(r.value == utility_value(p, 5.0));
    }
    SUBCASE("diverging delay with positive weight") {
        CHECK(net_revenue(p, {1.0, 3.0, 1.0}, 5.0).neg_infinite);
    }
    SUBCASE("composition of the closed forms") {
        Revenue r = net_revenue(p, {1.0, 3.0, 1.0}, 12.0);
        REQUIRE_FALSE(r.neg_infinite);
        CHECK(r.value == doctest::Approx(utility_value(p, 12.0) - 0.75).epsilon(1e-12));
    }
}

TEST_CASE("slice payoff") {
    Scenario s = fixtures::single_node(10.0, 1.0, 20.0, 1.0);
    PriceTable prices;
    prices.mu[0] = {2.0};

    SUBCASE("zero allocation with steep utility") {
        double v = payoff(s.slices[0], {{{0, 0}, 0.0}}, prices, s.topology);
        CHECK(v == -std::numeric_limits<double>::infinity());
    }
    SUBCASE("closed form at volume 10 and unit cost 2") {
        // utility phi*log(x / (phi/100)) = 20*log(50), payment 20
        double v = payoff(s.slices[0], {{{0, 0}, 10.0}}, prices, s.topology);
        CHECK(v == doctest::Approx(20.0 * std::log(50.0) - 20.0).epsilon(1e-12));
    }
    SUBCASE("doubling prices subtracts the payment once more") {
        PathTraffic x{{{0, 0}, 4.0}};
        PriceTable doubled;
        doubled.mu[0] = {4.0};
        double base = payoff(s.slices[0], x, prices, s.topology);
        double more = payoff(s.slices[0], x, doubled, s.topology);
        CHECK(base - more == doctest::Approx(4.0 * 2.0).epsilon(1e-12));
    }
    SUBCASE("concave in the path traffic") {
        Scenario two = fixtures::two_paths();
        PriceTable pt;
        pt.mu[0] = {1.0};
        pt.mu[1] = {3.0};
        Rng rng(12);
        for (int trial = 0; trial < 100; ++trial) {
            PathTraffic a{{{0, 0}, rng.uniform(0.01, 10)}, {{0, 1}, rng.uniform(0.01, 10)}};
            PathTraffic b{{{0, 0}, rng.uniform(0.01, 10)}, {{0, 1}, rng.uniform(0.01, 10)}};
            PathTraffic mid;
            for (const auto& [k, v] : a) mid[k] = 0.5 * (v + b.at(k));
            double lhs = payoff(two.slices[0], mid, pt, two.topology);
            double rhs = 0.5 * (payoff(two.slices[0], a, pt, two.topology) +
                                payoff(two.slices[0], b, pt, two.topology));
            CHECK(lhs >= rhs - 1e-9 * std::abs(rhs));
        }
    }
}

TEST_CASE("social welfare matches utility minus cost") {
    Scenario s = fixtures::single_node(10.0, 1.0, 20.0, 1.0);
    double w = social_welfare(s, {{{0, 0}, 10.0}});
    CHECK(w == doctest::Approx(20.0 * std::log(50.0) - 10.0).epsilon(1e-12));
}
