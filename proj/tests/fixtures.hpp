#ifndef SLICENET_TESTS_FIXTURES_HPP
#define SLICENET_TESTS_FIXTURES_HPP

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet::fixtures {

// One core node, one resource, one slice, one path. Closed-form equilibrium
// for capacity 10, opex 1, phi 20, alpha 1: volume 10, price 2, payment 20.
inline Scenario single_node(double capacity = 10.0, double opex = 1.0, double phi = 20.0,
                            double alpha = 1.0, double demand = 1.0) {
    Scenario s;
    s.topology.num_areas = 1;
    NodeSpec n;
    n.id = 0;
    n.domain = NetworkDomain::core;
    n.resources = {"r0"};
    n.capacity = {capacity};
    n.opex = {opex};
    s.topology.nodes.push_back(n);
    s.topology.paths.push_back({0, 1, {0}});
    SliceSpec slice;
    slice.id = 0;
    slice.areas[1] = {{phi, alpha}, 10000.0, {}};
    slice.demand[{0, 0}] = {demand};
    s.slices.push_back(slice);
    return s;
}

inline void add_single_node_slice(Scenario& s, int id, double phi, double alpha,
                                  double demand = 1.0) {
    SliceSpec slice;
    slice.id = id;
    slice.areas[1] = {{phi, alpha}, 10000.0, {}};
    slice.demand[{0, 0}] = {demand};
    s.slices.push_back(slice);
}

// Two access points feeding one regional unit; three slices. The lightly
// loaded AP bandwidth looks dominant end to end, but the regional CPU is the
// real bottleneck shared by everyone.
inline Scenario counterexample() {
    Scenario s;
    s.topology.num_areas = 2;
    NodeSpec ap1;
    ap1.id = 0;
    ap1.domain = NetworkDomain::ran;
    ap1.resources = {"bw"};
    ap1.capacity = {8.0};
    ap1.opex = {1.0};
    NodeSpec ap2 = ap1;
    ap2.id = 1;
    ap2.capacity = {16.0};
    NodeSpec cran;
    cran.id = 2;
    cran.domain = NetworkDomain::cran;
    cran.resources = {"cpu"};
    cran.capacity = {20.0};
    cran.opex = {1.0};
    s.topology.nodes = {ap1, ap2, cran};
    s.topology.paths.push_back({0, 1, {0, 2}});
    s.topology.paths.push_back({1, 2, {1, 2}});

    for (int n = 0; n < 3; ++n) {
        SliceSpec slice;
        slice.id = n;
        int area = n == 0 ? 1 : 2;
        int path = n == 0 ? 0 : 1;
        slice.areas[area] = {{10.0, 1.0}, 10000.0, {}};
        slice.demand[{path, path == 0 ? 0 : 1}] = {1.0}; // AP bandwidth
        slice.demand[{path, 2}] = {1.0};                 // regional CPU
        s.slices.push_back(slice);
    }
    return s;
}

// Two parallel single-node paths in one area with distinct unit prices.
inline Scenario two_paths(double c1 = 100.0, double c2 = 100.0, double q1 = 1.0, double q2 = 1.0,
                          double phi = 9.0, double alpha = 1.0) {
    Scenario s;
    s.topology.num_areas = 1;
    for (int i = 0; i < 2; ++i) {
        NodeSpec n;
        n.id = i;
        n.domain = NetworkDomain::core;
        n.resources = {"r0"};
        n.capacity = {i == 0 ? c1 : c2};
        n.opex = {i == 0 ? q1 : q2};
        s.topology.nodes.push_back(n);
    }
    s.topology.paths.push_back({0, 1, {0}});
    s.topology.paths.push_back({1, 1, {1}});
    SliceSpec slice;
    slice.id = 0;
    slice.areas[1] = {{phi, alpha}, 10000.0, {}};
    slice.demand[{0, 0}] = {1.0};
    slice.demand[{1, 1}] = {1.0};
    s.slices.push_back(slice);
    return s;
}

inline PriceTable opex_prices(const Scenario& s) {
    PriceTable out;
    for (const auto& n : s.topology.nodes) {
        out.mu[n.id] = n.opex;
        out.eta[n.id] = ResourceVector(n.opex.size(), 0.0);
    }
    return out;
}

} // namespace slicenet::fixtures

#endif
