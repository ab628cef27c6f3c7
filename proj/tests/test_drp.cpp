#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "slicenet/drp.hpp"
#include "slicenet/harness.hpp"
#include "slicenet/utility.hpp"

using namespace slicenet;

TEST_CASE("slice best response") {
    SUBCASE("single path: volume equates marginal benefit with cost") {
        Scenario s = fixtures::single_node(10, 1, 20, 1);
        PriceTable prices;
        prices.mu[0] = {2.0};
        auto x = drp::slice_best_response(s.slices[0], prices, s.topology);
        CHECK(x.at({0, 0}) == doctest::Approx(10.0).epsilon(1e-14));
    }
    SUBCASE("unique cheapest path takes everything") {
        Scenario s = fixtures::two_paths(100, 100, 1, 1, 9, 1);
        PriceTable prices;
        prices.mu[0] = {3.0};
        prices.mu[1] = {5.0};
        auto x = drp::slice_best_response(s.slices[0], prices, s.topology);
        CHECK(x.at({0, 0}) == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(x.at({0, 1}) == 0.0);
    }
    SUBCASE("ties split uniformly") {
        Scenario s = fixtures::two_paths(100, 100, 1, 1, 9, 1);
        PriceTable prices;
        prices.mu[0] = {3.0};
        prices.mu[1] = {3.0};
        auto x = drp::slice_best_response(s.slices[0], prices, s.topology);
        CHECK(x.at({0, 0}) == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(x.at({0, 1}) == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("non-positive cost is a domain error") {
        Scenario s = fixtures::single_node();
        PriceTable prices;
        prices.mu[0] = {0.0};
        CHECK_THROWS_AS(drp::slice_best_response(s.slices[0], prices, s.topology),
                        std::domain_error);
    }
}

TEST_CASE("relaxed update") {
    PathTraffic current{{{0, 0}, 4.0}};
    PathTraffic target{{{0, 0}, 8.0}};
    CHECK(drp::relaxed_update(current, target, 0.5).at({0, 0}) == 6.0);
    CHECK(drp::relaxed_update(target, target, 0.5).at({0, 0}) == 8.0);
    CHECK(drp::relaxed_update({{{0, 0}, 0.0}}, {{{0, 0}, 10.0}}, 0.1).at({0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(drp::relaxed_update(current, target, 1.0), std::domain_error);
}

TEST_CASE("bids") {
    Scenario s = fixtures::single_node();
    PriceTable prices;
    prices.mu[0] = {2.0};
    SUBCASE("payment is price times drawn resources") {
        auto bids = drp::compute_bids(s.slices[0], {{{0, 0}, 10.0}}, prices, s.topology);
        CHECK(bids.w.at({0, 0})[0] == 20.0);
    }
    SUBCASE("no traffic, no payment") {
        auto bids = drp::compute_bids(s.slices[0], {{{0, 0}, 0.0}}, prices, s.topology);
        CHECK(bids.w.at({0, 0})[0] == 0.0);
    }
    SUBCASE("linear in the price") {
        PriceTable doubled;
        doubled.mu[0] = {4.0};
        auto bids = drp::compute_bids(s.slices[0], {{{0, 0}, 10.0}}, prices, s.topology);
        auto bids2 = drp::compute_bids(s.slices[0], {{{0, 0}, 10.0}}, doubled, s.topology);
        CHECK(bids2.w.at({0, 0})[0] == 2.0 * bids.w.at({0, 0})[0]);
    }
}

TEST_CASE("node price update") {
    NodeSpec node;
    node.id = 0;
    node.resources = {"r0"};
    node.capacity = {20.0};
    node.opex = {1.0};
    SUBCASE("cleared resource prices above cost") {
        auto upd = drp::node_price_update(node, ResourceVector{30.0});
        CHECK(upd.mu_hat[0] == 1.5);
        CHECK(upd.eta[0] == 1.0);
    }
    SUBCASE("under-demanded resource stays at cost") {
        auto upd = drp::node_price_update(node, ResourceVector{10.0});
        CHECK(upd.mu_hat[0] == 1.0);
        CHECK(upd.eta[0] == 0.5);
    }
    SUBCASE("no bids") {
        auto upd = drp::node_price_update(node, ResourceVector{0.0});
        CHECK(upd.mu_hat[0] == 1.0);
        CHECK(upd.eta[0] == 0.0);
    }
    SUBCASE("allocations clear exactly when priced above cost") {
        Rng rng(21);
        for (int trial = 0; trial < 100; ++trial) {
            double bids = rng.uniform(0, 100);
            auto upd = drp::node_price_update(node, ResourceVector{bids});
            double allocated = bids / upd.mu_hat[0];
            CHECK(allocated <= node.capacity[0] * (1 + 1e-12));
            if (upd.mu_hat[0] > node.opex[0])
                CHECK(allocated == doctest::Approx(node.capacity[0]).epsilon(1e-12));
        }
    }
}

TEST_CASE("actual traffic correction") {
    Scenario s = fixtures::single_node();
    PathTraffic x{{{0, 0}, 6.0}};
    PriceTable before;
    before.mu[0] = {2.0};
    SUBCASE("unchanged prices keep the traffic") {
        CHECK(drp::actual_traffic(x, before, before, s).at({0, 0}) == 6.0);
    }
    SUBCASE("doubled price halves the traffic") {
        PriceTable after;
        after.mu[0] = {4.0};
        CHECK(drp::actual_traffic(x, before, after, s).at({0, 0}) == 3.0);
    }
    SUBCASE("price drops do not inflate traffic") {
        PriceTable after;
        after.mu[0] = {1.0};
        CHECK(drp::actual_traffic(x, before, after, s).at({0, 0}) == 6.0);
    }
    SUBCASE("unused resources do not scale the slice") {
        Scenario t = fixtures::single_node();
        t.topology.nodes[0].resources = {"r0", "r1"};
        t.topology.nodes[0].capacity = {10.0, 10.0};
        t.topology.nodes[0].opex = {1.0, 1.0};
        t.slices[0].demand[{0, 0}] = {1.0, 0.0};
        PriceTable b2;
        b2.mu[0] = {2.0, 1.0};
        PriceTable a2;
        a2.mu[0] = {2.0, 50.0}; // spike on the resource the slice does not use
        CHECK(drp::actual_traffic(x, b2, a2, t).at({0, 0}) == 6.0);
    }
}

TEST_CASE("budget admission back-off") {
    CHECK(drp::budget_admission_control(10.0, 120.0, 100.0, 0.9) == 9.0);
    CHECK(drp::budget_admission_control(10.0, 80.0, 100.0, 0.9) == 10.0);
    double phi = 10.0;
    for (int i = 0; i < 20; ++i) {
        double next = drp::budget_admission_control(phi, 200.0, 100.0, 0.9);
        CHECK(next < phi);
        phi = next;
    }
}

TEST_CASE("auction on the closed-form instance") {
    drp::DrpConfig cfg;
    cfg.epsilon = 1e-7;
    cfg.step = 0.3;
    cfg.max_iters = 20000;

    SUBCASE("cleared resource") {
        Scenario s = fixtures::single_node(10, 1, 20, 1);
        auto res = drp::run_auction(s, cfg);
        REQUIRE(res.report.converged());
        CHECK(res.allocation.x_path.at({0, 0}) == doctest::Approx(10.0).epsilon(1e-5));
        CHECK(res.prices.mu.at(0)[0] == doctest::Approx(2.0).epsilon(1e-5));
        CHECK(res.bids.w.at({0, 0})[0] == doctest::Approx(20.0).epsilon(1e-4));
        CHECK(res.prices.eta.at(0)[0] == 1.0);
    }
    SUBCASE("interior optimum leaves the price at cost") {
        Scenario s = fixtures::single_node(30, 1, 20, 1);
        auto res = drp::run_auction(s, cfg);
        REQUIRE(res.report.converged());
        CHECK(res.allocation.x_path.at({0, 0}) == doctest::Approx(20.0).epsilon(1e-5));
        CHECK(res.prices.mu.at(0)[0] == 1.0);
        CHECK(res.prices.eta.at(0)[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
    }
    SUBCASE("empty market settles immediately") {
        Scenario s = fixtures::single_node();
        s.slices.clear();
        auto res = drp::run_auction(s, cfg);
        CHECK(res.report.iterations == 1);
        CHECK(res.report.converged());
        CHECK(res.prices.mu.at(0)[0] == 1.0);
    }
}

TEST_CASE("auction respects budgets when enforcement is on") {
    Scenario s = fixtures::single_node(10, 1, 20, 1);
    s.slices[0].areas[1].budget = 5.0; // equilibrium payment would be 20
    drp::DrpConfig cfg;
    cfg.epsilon = 1e-7;
    cfg.step = 0.3;
    cfg.max_iters = 50000;
    cfg.budget_enforcement = true;
    auto res = drp::run_auction(s, cfg);
    REQUIRE(res.report.converged());
    CHECK(res.payments.at({0, 1}) <= 5.0 * (1 + 1e-6));
    CHECK(res.admitted_phi.at({0, 1}) < 20.0);
}

TEST_CASE("fixed-point properties on a generated scenario") {
    harness::ScenarioConfig cfg;
    cfg.seed = 77;
    cfg.num_slices = 8;
    cfg.load = harness::LoadLevel::custom;
    cfg.custom_phi = 0.6;
    Scenario s = harness::generate_scenario(cfg);

    drp::DrpConfig dc;
    dc.epsilon = 1e-8;
    dc.step = 0.4;
    dc.max_iters = 60000;
    auto res = drp::run_auction(s, dc);
    REQUIRE(res.report.converged());

    SUBCASE("allocation is feasible") {
        CHECK(check_feasibility(res.allocation.x_path, s.slices, s.topology).feasible);
    }
    SUBCASE("complementary slackness: cleared or at cost") {
        NodeAllocation na = res.allocation.node_alloc(s);
        for (const auto& node : s.topology.nodes) {
            ResourceVector total(node.capacity.size(), 0.0);
            for (const auto& [key, a] : na)
                if (key.second == node.id)
                    for (std::size_t r = 0; r < a.size(); ++r) total[r] += a[r];
            for (std::size_t r = 0; r < node.capacity.size(); ++r) {
                double mu = res.prices.mu.at(node.id)[r];
                if (mu > node.opex[r] * (1 + 1e-9))
                    CHECK(total[r] == doctest::Approx(node.capacity[r]).epsilon(1e-6));
                else
                    CHECK(mu == doctest::Approx(node.opex[r]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("carrying paths sit at the minimum cost") {
        AreaTraffic totals = res.allocation.area_traffic(s.topology);
        for (const auto& slice : s.slices) {
            for (const auto& [area, params] : slice.areas) {
                double best = 1e300;
                for (const PathSpec* p : s.topology.paths_in_area(area))
                    best = std::min(best, path_unit_cost(*p, slice, res.prices));
                for (const PathSpec* p : s.topology.paths_in_area(area)) {
                    double x = res.allocation.x_path.at({slice.id, p->id});
                    if (x > 1e-3 * totals.at({slice.id, area}))
                        CHECK(path_unit_cost(*p, slice, res.prices) <= best * (1 + 1e-6));
                }
                CHECK(totals.at({slice.id, area}) ==
                      doctest::Approx(inverse_marginal(params.utility, best)).epsilon(1e-4));
            }
        }
    }
    SUBCASE("identical runs are bit-identical") {
        auto res2 = drp::run_auction(s, dc);
        CHECK(res2.allocation.x_path == res.allocation.x_path);
        CHECK(res2.report.deviations == res.report.deviations);
        CHECK(res2.prices.mu == res.prices.mu);
    }
}
