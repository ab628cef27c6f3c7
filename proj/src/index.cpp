#include "slicenet/index.hpp"

#include <algorithm>

namespace slicenet {

ScenarioIndex::ScenarioIndex(const Scenario& scenario) : scenario_(&scenario) {
    validate(scenario);
    const auto& topo = scenario.topology;

    for (const auto& n : topo.nodes) {
        node_row_start_.push_back(static_cast<int>(row_capacity_.size()));
        for (std::size_t r = 0; r < n.resources.size(); ++r) {
            row_capacity_.push_back(n.capacity[r]);
            row_opex_.push_back(n.opex[r]);
            row_node_.push_back(n.id);
            row_resource_.push_back(static_cast<int>(r));
        }
    }

    for (const auto& s : scenario.slices) slice_ids_.push_back(s.id);
    std::sort(slice_ids_.begin(), slice_ids_.end());
    for (const auto& p : topo.paths) path_ids_.push_back(p.id);
    std::sort(path_ids_.begin(), path_ids_.end());

    for (std::size_t si = 0; si < slice_ids_.size(); ++si) {
        const SliceSpec& s = scenario.slice(slice_ids_[si]);
        for (const auto& [area, params] : s.areas) {
            Entity e;
            e.slice = static_cast<int>(si);
            e.area = area;
            e.params = &params;
            for (int pid : path_ids_) {
                const PathSpec& p = topo.path(pid);
                if (p.area != area) continue;
                Pair pair;
                pair.slice = static_cast<int>(si);
                pair.path = path_index(pid);
                pair.entity = static_cast<int>(entities_.size());
                for (int nid : p.nodes) {
                    const DemandVector& d = s.demand_at(pid, nid);
                    int base = first_row_of_node(nid);
                    for (std::size_t r = 0; r < d.size(); ++r)
                        if (d[r] > 0) pair.coeffs.emplace_back(base + static_cast<int>(r), d[r]);
                }
                e.pairs.push_back(static_cast<int>(pairs_.size()));
                pairs_.push_back(std::move(pair));
            }
            entities_.push_back(std::move(e));
        }
    }
}

int ScenarioIndex::first_row_of_node(int node_id) const {
    const auto& nodes = scenario_->topology.nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == node_id) return node_row_start_[i];
    throw structural_error("unknown node id " + std::to_string(node_id));
}

int ScenarioIndex::slice_index(int slice_id) const {
    auto it = std::lower_bound(slice_ids_.begin(), slice_ids_.end(), slice_id);
    if (it == slice_ids_.end() || *it != slice_id)
        throw structural_error("unknown slice id " + std::to_string(slice_id));
    return static_cast<int>(it - slice_ids_.begin());
}

int ScenarioIndex::path_index(int path_id) const {
    auto it = std::lower_bound(path_ids_.begin(), path_ids_.end(), path_id);
    if (it == path_ids_.end() || *it != path_id)
        throw structural_error("unknown path id " + std::to_string(path_id));
    return static_cast<int>(it - path_ids_.begin());
}

int ScenarioIndex::pair_index(int slice_id, int path_id) const {
    int si = slice_index(slice_id);
    int pi = path_index(path_id);
    for (std::size_t k = 0; k < pairs_.size(); ++k)
        if (pairs_[k].slice == si && pairs_[k].path == pi) return static_cast<int>(k);
    return -1;
}

void ScenarioIndex::accumulate_load(const std::vector<double>& x, std::vector<double>& load) const {
    load.assign(row_capacity_.size(), 0.0);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        double v = x[k];
        if (v == 0.0) continue;
        for (const auto& [row, d] : pairs_[k].coeffs) load[row] += v * d;
    }
}

std::vector<double> ScenarioIndex::dense_from(const PathTraffic& x) const {
    std::vector<double> out(pairs_.size(), 0.0);
    for (const auto& [key, v] : x) {
        int k = pair_index(key.first, key.second);
        if (k < 0)
            throw structural_error("traffic on inactive (slice, path): " +
                                   std::to_string(key.first) + ", " + std::to_string(key.second));
        out[k] = v;
    }
    return out;
}

PathTraffic ScenarioIndex::traffic_from(const std::vector<double>& x) const {
    PathTraffic out;
    for (std::size_t k = 0; k < pairs_.size(); ++k)
        out[{slice_ids_[pairs_[k].slice], path_ids_[pairs_[k].path]}] = x[k];
    return out;
}

std::vector<double> ScenarioIndex::dense_prices(const PriceTable& prices) const {
    std::vector<double> mu(row_capacity_.size(), 0.0);
    for (int row = 0; row < num_rows(); ++row)
        mu[row] = prices.prices_at(row_node_[row])[static_cast<std::size_t>(row_resource_[row])];
    return mu;
}

PriceTable ScenarioIndex::price_table(const std::vector<double>& mu,
                                      const std::vector<double>& eta) const {
    PriceTable out;
    for (const auto& n : scenario_->topology.nodes) {
        int base = first_row_of_node(n.id);
        ResourceVector m(n.resources.size(), 0.0), e(n.resources.size(), 0.0);
        for (std::size_t r = 0; r < n.resources.size(); ++r) {
            m[r] = mu[base + static_cast<int>(r)];
            e[r] = eta.empty() ? 0.0 : eta[base + static_cast<int>(r)];
        }
        out.mu[n.id] = std::move(m);
        out.eta[n.id] = std::move(e);
    }
    return out;
}

} // namespace slicenet
