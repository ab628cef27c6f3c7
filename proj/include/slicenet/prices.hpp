#ifndef SLICENET_PRICES_HPP
#define SLICENET_PRICES_HPP

#include <map>
#include <utility>

#include "slicenet/model.hpp"

namespace slicenet {

// Unit prices and utilization fractions per (node, resource slot).
// Invariants: mu >= opex everywhere; eta == 1 wherever mu > opex.
struct PriceTable {
    std::map<int, ResourceVector> mu;  // node id -> price per unit
    std::map<int, ResourceVector> eta; // node id -> utilized fraction in [0, 1]

    const ResourceVector& prices_at(int node) const;
};

// Payments per (slice, node, resource): w = mu * sum_p x_p * d.
struct BidMatrix {
    std::map<std::pair<int, int>, ResourceVector> w; // (slice, node) -> per-resource payment

    double total_at(int node, int resource) const; // sum over slices
};

using AreaPayments = std::map<std::pair<int, int>, double>; // (slice, area) -> currency

// w_{n,l}: total payment by a slice for resources serving its area-l traffic.
AreaPayments area_payments(const PathTraffic& x_path, const PriceTable& prices,
                           const Scenario& scenario);

// w^p_{n,i}: payment by slice n to node i for service over path p.
std::map<std::tuple<int, int, int>, double>
path_node_payments(const PathTraffic& x_path, const PriceTable& prices, const Scenario& scenario);

} // namespace slicenet

#endif
