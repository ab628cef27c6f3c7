#include "slicenet/utility.hpp"

#include <cmath>
#include <limits>

namespace slicenet {

double marginal_utility(const UtilityParams& p, double z) {
    if (!(z > 0)) throw std::domain_error("marginal_utility: traffic must be positive");
    return std::pow(p.phi / z, p.alpha);
}

double inverse_marginal(const UtilityParams& p, double y) {
    if (!(y > 0)) throw std::domain_error("inverse_marginal: price must be positive");
    return p.phi * std::pow(y, -1.0 / p.alpha);
}

double utility_value(const UtilityParams& p, double z) {
    if (!(z > 0)) throw std::domain_error("utility_value: traffic must be positive");
    const double z0 = reference_traffic(p);
    if (p.alpha == 1.0) return p.phi * std::log(z / z0);
    // phi^a * (z^(1-a) - z0^(1-a)) / (1-a), written to stay stable as a -> 1
    const double one_minus_a = 1.0 - p.alpha;
    return std::pow(p.phi, p.alpha) * std::pow(z0, one_minus_a) *
           std::expm1(one_minus_a * std::log(z / z0)) / one_minus_a;
}

Delay delay(const DelayParams& d, const UtilityParams& p, double x) {
    if (!(x > p.phi)) return Delay::unbounded();
    return {d.packet_bits / (x - p.phi) + d.hops * d.packet_bits / x, false};
}

Revenue net_revenue(const UtilityParams& p, const DelayParams& d, double x) {
    if (!(x > 0)) throw std::domain_error("net_revenue: traffic must be positive");
    if (d.beta == 0.0) return {utility_value(p, x), false};
    Delay dl = delay(d, p, x);
    if (dl.infinite) return {0.0, true};
    return {utility_value(p, x) - d.beta * dl.seconds, false};
}

double payoff(const SliceSpec& slice, const PathTraffic& x_path, const PriceTable& prices,
              const TopologySpec& topology) {
    // Utility term over per-area totals.
    std::map<int, double> area_total;
    for (const auto& [area, params] : slice.areas) area_total[area] = 0.0;
    double payment = 0.0;
    for (const auto& [key, x] : x_path) {
        if (key.first != slice.id) continue;
        if (x < 0) throw std::domain_error("payoff: negative path traffic");
        const PathSpec& p = topology.path(key.second);
        area_total[p.area] += x;
        payment += x * path_unit_cost(p, slice, prices);
    }
    double gained = 0.0;
    for (const auto& [area, total] : area_total) {
        const UtilityParams& u = slice.areas.at(area).utility;
        if (total > 0) {
            gained += utility_value(u, total);
        } else if (u.alpha >= 1.0) {
            return -std::numeric_limits<double>::infinity();
        } else {
            // finite limit of the antiderivative at zero
            const double z0 = reference_traffic(u);
            gained += -std::pow(u.phi, u.alpha) * std::pow(z0, 1.0 - u.alpha) / (1.0 - u.alpha);
        }
    }
    return gained - payment;
}

double social_welfare(const Scenario& scenario, const PathTraffic& x_path) {
    AreaTraffic totals = aggregate_area_traffic(x_path, scenario.topology);
    double welfare = 0.0;
    for (const auto& s : scenario.slices) {
        for (const auto& [area, params] : s.areas) {
            auto it = totals.find({s.id, area});
            double y = it == totals.end() ? 0.0 : it->second;
            if (y > 0) {
                welfare += utility_value(params.utility, y);
            } else if (params.utility.alpha >= 1.0) {
                return -std::numeric_limits<double>::infinity();
            } else {
                const double z0 = reference_traffic(params.utility);
                welfare -= std::pow(params.utility.phi, params.utility.alpha) *
                           std::pow(z0, 1.0 - params.utility.alpha) / (1.0 - params.utility.alpha);
            }
        }
    }
    for (const auto& [key, x] : x_path) {
        const PathSpec& p = scenario.topology.path(key.second);
        const SliceSpec& s = scenario.slice(key.first);
        for (int nid : p.nodes) {
            const DemandVector& d = s.demand_at(p.id, nid);
            const NodeSpec& n = scenario.topology.node(nid);
            for (std::size_t r = 0; r < d.size(); ++r) welfare -= x * d[r] * n.opex[r];
        }
    }
    return welfare;
}

} // namespace slicenet
