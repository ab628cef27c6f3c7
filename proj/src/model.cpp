#include "slicenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "slicenet/prices.hpp"

namespace slicenet {

const char* domain_name(NetworkDomain d) {
    switch (d) {
    case NetworkDomain::ran: return "ran";
    case NetworkDomain::cran: return "cran";
    case NetworkDomain::core: return "cn";
    }
    return "?";
}

const NodeSpec& TopologySpec::node(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return n;
    throw structural_error("unknown node id " + std::to_string(id));
}

const PathSpec& TopologySpec::path(int id) const {
    for (const auto& p : paths)
        if (p.id == id) return p;
    throw structural_error("unknown path id " + std::to_string(id));
}

std::vector<const PathSpec*> TopologySpec::paths_in_area(int area) const {
    std::vector<const PathSpec*> out;
    for (const auto& p : paths)
        if (p.area == area) out.push_back(&p);
    return out;
}

const DemandVector& SliceSpec::demand_at(int path, int node) const {
    auto it = demand.find({path, node});
    if (it == demand.end())
        throw structural_error("slice " + std::to_string(id) + ": no demand vector for path " +
                               std::to_string(path) + ", node " + std::to_string(node));
    return it->second;
}

const DemandVector* SliceSpec::find_demand(int path, int node) const {
    auto it = demand.find({path, node});
    return it == demand.end() ? nullptr : &it->second;
}

const SliceSpec& Scenario::slice(int id) const {
    for (const auto& s : slices)
        if (s.id == id) return s;
    throw structural_error("unknown slice id " + std::to_string(id));
}

void validate(const Scenario& scenario) {
    const auto& topo = scenario.topology;
    std::set<int> node_ids, path_ids;
    for (const auto& n : topo.nodes) {
        if (!node_ids.insert(n.id).second)
            throw structural_error("duplicate node id " + std::to_string(n.id));
        if (n.capacity.size() != n.resources.size() || n.opex.size() != n.resources.size())
            throw structural_error("node " + std::to_string(n.id) +
                                   ": capacity/opex size does not match resource slots");
        for (double c : n.capacity.values)
            if (c < 0) throw structural_error("node " + std::to_string(n.id) + ": negative capacity");
        for (double q : n.opex.values)
            if (q < 0) throw structural_error("node " + std::to_string(n.id) + ": negative opex");
    }
    for (const auto& p : topo.paths) {
        if (!path_ids.insert(p.id).second)
            throw structural_error("duplicate path id " + std::to_string(p.id));
        if (p.area < 1 || p.area > topo.num_areas)
            throw structural_error("path " + std::to_string(p.id) + ": area out of range");
        if (p.nodes.empty())
            throw structural_error("path " + std::to_string(p.id) + ": empty node sequence");
        int prev = 0;
        for (int nid : p.nodes) {
            const auto& n = topo.node(nid); // throws on unknown id
            if (static_cast<int>(n.domain) <= prev)
                throw structural_error("path " + std::to_string(p.id) +
                                       ": nodes must be ordered RAN->CRAN->CN, one per domain");
            prev = static_cast<int>(n.domain);
        }
    }
    for (int a = 1; a <= topo.num_areas; ++a)
        if (topo.paths_in_area(a).empty())
            throw structural_error("area " + std::to_string(a) + " has no paths");

    std::set<int> slice_ids;
    for (const auto& s : scenario.slices) {
        if (!slice_ids.insert(s.id).second)
            throw structural_error("duplicate slice id " + std::to_string(s.id));
        for (const auto& [area, params] : s.areas) {
            if (area < 1 || area > topo.num_areas)
                throw structural_error("slice " + std::to_string(s.id) + ": unknown area " +
                                       std::to_string(area));
            if (!(params.utility.phi > 0) || !(params.utility.alpha > 0))
                throw structural_error("slice " + std::to_string(s.id) +
                                       ": utility parameters must be positive");
            if (params.budget < 0)
                throw structural_error("slice " + std::to_string(s.id) + ": negative budget");
            for (const PathSpec* p : topo.paths_in_area(area)) {
                for (int nid : p->nodes) {
                    const DemandVector* d = s.find_demand(p->id, nid);
                    if (!d)
                        throw structural_error("slice " + std::to_string(s.id) +
                                               ": missing demand vector for path " +
                                               std::to_string(p->id) + ", node " + std::to_string(nid));
                    const auto& n = topo.node(nid);
                    if (d->size() != n.resources.size())
                        throw structural_error("slice " + std::to_string(s.id) +
                                               ": demand vector size mismatch at node " +
                                               std::to_string(nid));
                    bool any = false;
                    for (std::size_t r = 0; r < d->size(); ++r) {
                        double v = (*d)[r];
                        if (v < 0)
                            throw structural_error("slice " + std::to_string(s.id) +
                                                   ": negative demand entry");
                        if (v > 0) {
                            any = true;
                            if (!(n.opex[r] > 0))
                                throw structural_error(
                                    "node " + std::to_string(nid) + ", resource '" + n.resources[r] +
                                    "': zero opex on a resource referenced by slice " +
                                    std::to_string(s.id));
                            if (!(n.capacity[r] > 0))
                                throw structural_error(
                                    "node " + std::to_string(nid) + ", resource '" + n.resources[r] +
                                    "': zero capacity on a resource referenced by slice " +
                                    std::to_string(s.id));
                        }
                    }
                    if (!any)
                        throw structural_error("slice " + std::to_string(s.id) +
                                               ": all-zero demand vector at node " +
                                               std::to_string(nid));
                }
            }
        }
    }
}

AreaTraffic aggregate_area_traffic(const PathTraffic& x_path, const TopologySpec& topology) {
    AreaTraffic out;
    for (const auto& [key, x] : x_path) {
        const auto& [slice, path] = key;
        out[{slice, topology.path(path).area}] += x;
    }
    return out;
}

NodeAllocation node_allocation(const PathTraffic& x_path, const std::vector<SliceSpec>& slices,
                               const TopologySpec& topology) {
    NodeAllocation out;
    for (const auto& [key, x] : x_path) {
        const auto& [slice_id, path_id] = key;
        const PathSpec& p = topology.path(path_id);
        const SliceSpec* slice = nullptr;
        for (const auto& s : slices)
            if (s.id == slice_id) { slice = &s; break; }
        if (!slice) throw structural_error("unknown slice id " + std::to_string(slice_id));
        for (int nid : p.nodes) {
            const DemandVector& d = slice->demand_at(path_id, nid);
            auto [it, inserted] = out.try_emplace({slice_id, nid}, ResourceVector(d.size(), 0.0));
            ResourceVector& a = it->second;
            for (std::size_t r = 0; r < d.size(); ++r) a[r] += x * d[r];
        }
    }
    return out;
}

FeasibilityReport check_feasibility(const PathTraffic& x_path, const std::vector<SliceSpec>& slices,
                                    const TopologySpec& topology) {
    NodeAllocation alloc = node_allocation(x_path, slices, topology);
    std::map<int, ResourceVector> totals;
    for (const auto& [key, a] : alloc) {
        auto [it, inserted] = totals.try_emplace(key.second, ResourceVector(a.size(), 0.0));
        for (std::size_t r = 0; r < a.size(); ++r) it->second[r] += a[r];
    }
    FeasibilityReport report;
    for (const auto& [nid, total] : totals) {
        const NodeSpec& n = topology.node(nid);
        for (std::size_t r = 0; r < total.size(); ++r) {
            if (total[r] > n.capacity[r] * (1.0 + kFeasibilityTol)) {
                report.feasible = false;
                report.violations.push_back(
                    {nid, static_cast<int>(r), total[r] - n.capacity[r]});
            }
        }
    }
    return report;
}

double path_unit_cost(const PathSpec& path, const SliceSpec& slice, const PriceTable& prices) {
    double cost = 0.0;
    for (int nid : path.nodes) {
        const DemandVector& d = slice.demand_at(path.id, nid);
        const ResourceVector& mu = prices.prices_at(nid);
        if (mu.size() != d.size())
            throw structural_error("price vector size mismatch at node " + std::to_string(nid));
        for (std::size_t r = 0; r < d.size(); ++r) cost += d[r] * mu[r];
    }
    return cost;
}

DemandVector infer_demand_vector(const DemandVector& estimate, const std::vector<double>& utilization) {
    if (estimate.size() != utilization.size())
        throw structural_error("estimate/utilization size mismatch");
    double u_max = 0.0;
    for (double u : utilization) u_max = std::max(u_max, u);
    if (!(u_max > 0)) throw std::domain_error("all-zero utilization: demand is undefined");
    DemandVector d(estimate.size(), 0.0);
    for (std::size_t r = 0; r < estimate.size(); ++r) {
        if (utilization[r] > 0 && !(estimate[r] > 0))
            throw std::domain_error("utilized resource has zero demand estimate");
        d[r] = estimate[r] * utilization[r] / u_max;
    }
    return d;
}

double AllocationState::slice_total(int slice) const {
    double total = 0.0;
    for (const auto& [key, x] : x_path)
        if (key.first == slice) total += x;
    return total;
}

const ResourceVector& PriceTable::prices_at(int node) const {
    auto it = mu.find(node);
    if (it == mu.end()) throw structural_error("no prices for node " + std::to_string(node));
    return it->second;
}

double BidMatrix::total_at(int node, int resource) const {
    double total = 0.0;
    for (const auto& [key, bids] : w)
        if (key.second == node) total += bids[static_cast<std::size_t>(resource)];
    return total;
}

AreaPayments area_payments(const PathTraffic& x_path, const PriceTable& prices,
                           const Scenario& scenario) {
    AreaPayments out;
    for (const auto& s : scenario.slices)
        for (const auto& [area, params] : s.areas) out[{s.id, area}] = 0.0;
    for (const auto& [key, x] : x_path) {
        const auto& [slice_id, path_id] = key;
        const PathSpec& p = scenario.topology.path(path_id);
        const SliceSpec& s = scenario.slice(slice_id);
        out[{slice_id, p.area}] += x * path_unit_cost(p, s, prices);
    }
    return out;
}

std::map<std::tuple<int, int, int>, double>
path_node_payments(const PathTraffic& x_path, const PriceTable& prices, const Scenario& scenario) {
    std::map<std::tuple<int, int, int>, double> out;
    for (const auto& [key, x] : x_path) {
        const auto& [slice_id, path_id] = key;
        const PathSpec& p = scenario.topology.path(path_id);
        const SliceSpec& s = scenario.slice(slice_id);
        for (int nid : p.nodes) {
            const DemandVector& d = s.demand_at(path_id, nid);
            const ResourceVector& mu = prices.prices_at(nid);
            double pay = 0.0;
            for (std::size_t r = 0; r < d.size(); ++r) pay += mu[r] * d[r];
            out[{slice_id, path_id, nid}] += x * pay;
        }
    }
    return out;
}

} // namespace slicenet
