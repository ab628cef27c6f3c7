#include "slicenet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slicenet/utility.hpp"

namespace slicenet::baselines {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double opex_unit_cost(const Scenario& scenario, const SliceSpec& slice, const PathSpec& path) {
    double cost = 0.0;
    for (int nid : path.nodes) {
        const DemandVector& d = slice.demand_at(path.id, nid);
        const NodeSpec& n = scenario.topology.node(nid);
        for (std::size_t r = 0; r < d.size(); ++r) cost += d[r] * n.opex[r];
    }
    return cost;
}

// Largest volume the slice could push alone through the path.
double standalone_bottleneck(const Scenario& scenario, const SliceSpec& slice, const PathSpec& path) {
    double volume = kInf;
    for (int nid : path.nodes) {
        const DemandVector& d = slice.demand_at(path.id, nid);
        const NodeSpec& n = scenario.topology.node(nid);
        for (std::size_t r = 0; r < d.size(); ++r)
            if (d[r] > 0) volume = std::min(volume, n.capacity[r] / d[r]);
    }
    return volume;
}

struct DrfEntity {
    int slice_id;
    int area;
    int path_id;
    const AreaSliceParams* params;
    double weight;
};

std::vector<DrfEntity> drf_entities(const Scenario& scenario, const AreaWeights& weights,
                                    const DesignatedPaths& designated) {
    std::vector<DrfEntity> out;
    for (const auto& s : scenario.slices) {
        for (const auto& [area, params] : s.areas) {
            auto pit = designated.find({s.id, area});
            if (pit == designated.end())
                throw structural_error("no designated path for slice " + std::to_string(s.id) +
                                       ", area " + std::to_string(area));
            auto wit = weights.find({s.id, area});
            double w = wit == weights.end() ? 1.0 : wit->second;
            if (!(w > 0)) throw std::domain_error("drf weights must be positive");
            out.push_back({s.id, area, pit->second, &params, w});
        }
    }
    return out;
}

} // namespace

DesignatedPaths designated_paths(const Scenario& scenario) {
    DesignatedPaths out;
    for (const auto& s : scenario.slices) {
        for (const auto& [area, params] : s.areas) {
            double best = -1.0;
            int best_id = -1;
            for (const PathSpec* p : scenario.topology.paths_in_area(area)) {
                double volume = standalone_bottleneck(scenario, s, *p);
                if (volume > best || (volume == best && p->id < best_id)) {
                    best = volume;
                    best_id = p->id;
                }
            }
            out[{s.id, area}] = best_id;
        }
    }
    return out;
}

std::vector<double> progressive_fill(const std::vector<FillEntity>& entities,
                                     const std::vector<double>& capacity) {
    const std::size_t E = entities.size();
    const std::size_t R = capacity.size();
    std::vector<double> x(E, 0.0);
    std::vector<bool> active(E), saturated(R, false);
    for (std::size_t e = 0; e < E; ++e) active[e] = entities[e].rate > 0;
    for (std::size_t r = 0; r < R; ++r)
        if (!(capacity[r] > 0)) saturated[r] = true;

    auto freeze_on_saturated = [&] {
        for (std::size_t e = 0; e < E; ++e) {
            if (!active[e]) continue;
            for (const auto& [r, d] : entities[e].demand)
                if (d > 0 && saturated[r]) {
                    active[e] = false;
                    break;
                }
        }
    };
    freeze_on_saturated();

    std::vector<double> used(R), rate_sum(R);
    for (std::size_t guard = 0; guard <= E + R; ++guard) {
        bool any_active = false;
        for (std::size_t e = 0; e < E; ++e) any_active |= active[e];
        if (!any_active) break;

        std::fill(used.begin(), used.end(), 0.0);
        std::fill(rate_sum.begin(), rate_sum.end(), 0.0);
        for (std::size_t e = 0; e < E; ++e) {
            for (const auto& [r, d] : entities[e].demand) {
                used[r] += x[e] * d;
                if (active[e]) rate_sum[r] += entities[e].rate * d;
            }
        }

        double dt_min = kInf;
        int trigger_res = -1;
        for (std::size_t r = 0; r < R; ++r) {
            if (saturated[r] || rate_sum[r] <= 0) continue;
            double dt = std::max(0.0, (capacity[r] - used[r]) / rate_sum[r]);
            if (dt < dt_min) {
                dt_min = dt;
                trigger_res = static_cast<int>(r);
            }
        }
        for (std::size_t e = 0; e < E; ++e) {
            if (!active[e] || entities[e].cap == kInf) continue;
            double dt = std::max(0.0, (entities[e].cap - x[e]) / entities[e].rate);
            if (dt < dt_min) {
                dt_min = dt;
                trigger_res = -1;
            }
        }
        if (dt_min == kInf) break; // nothing can bind; defensive, demands are nonempty

        const double band = dt_min * (1.0 + 1e-12);
        // Capped entities inside the event band land exactly on their cap.
        std::vector<bool> capped_now(E, false);
        for (std::size_t e = 0; e < E; ++e) {
            if (!active[e] || entities[e].cap == kInf) continue;
            double dt = std::max(0.0, (entities[e].cap - x[e]) / entities[e].rate);
            if (dt <= band) capped_now[e] = true;
        }
        for (std::size_t e = 0; e < E; ++e) {
            if (!active[e]) continue;
            if (capped_now[e]) {
                x[e] = entities[e].cap;
                active[e] = false;
            } else if (trigger_res >= 0) {
                // single-rounding advance off the triggering resource
                x[e] += entities[e].rate * (capacity[trigger_res] - used[trigger_res]) /
                        rate_sum[trigger_res];
            } else {
                x[e] += entities[e].rate * dt_min;
            }
        }

        std::fill(used.begin(), used.end(), 0.0);
        for (std::size_t e = 0; e < E; ++e)
            for (const auto& [r, d] : entities[e].demand) used[r] += x[e] * d;
        for (std::size_t r = 0; r < R; ++r)
            if (!saturated[r] && used[r] >= capacity[r] * (1.0 - 1e-12)) saturated[r] = true;
        freeze_on_saturated();
    }
    return x;
}

AllocationState multi_domain_drf(const Scenario& scenario, const AreaWeights& weights,
                                 const DesignatedPaths& designated, DrfMode mode) {
    auto ents = drf_entities(scenario, weights, designated);

    // One constraint per (node, resource slot), in node order.
    std::vector<double> capacity;
    std::map<std::pair<int, int>, int> row_of;
    for (const auto& n : scenario.topology.nodes)
        for (std::size_t r = 0; r < n.capacity.size(); ++r) {
            row_of[{n.id, static_cast<int>(r)}] = static_cast<int>(capacity.size());
            capacity.push_back(n.capacity[r]);
        }

    std::vector<FillEntity> fill(ents.size());
    for (std::size_t e = 0; e < ents.size(); ++e) {
        const auto& ent = ents[e];
        const SliceSpec& s = scenario.slice(ent.slice_id);
        const PathSpec& p = scenario.topology.path(ent.path_id);
        double fraction = 0.0;
        for (int nid : p.nodes) {
            const DemandVector& d = s.demand_at(p.id, nid);
            const NodeSpec& n = scenario.topology.node(nid);
            for (std::size_t r = 0; r < d.size(); ++r) {
                if (d[r] > 0) {
                    fraction = std::max(fraction, d[r] / n.capacity[r]);
                    fill[e].demand.emplace_back(row_of[{nid, static_cast<int>(r)}], d[r]);
                }
            }
        }
        fill[e].rate = ent.weight / fraction;
        fill[e].cap = mode == DrfMode::weighted
                          ? inverse_marginal(ent.params->utility, opex_unit_cost(scenario, s, p))
                          : kInf;
    }

    std::vector<double> volume = progressive_fill(fill, capacity);
    AllocationState out;
    for (std::size_t e = 0; e < ents.size(); ++e)
        out.x_path[{ents[e].slice_id, ents[e].path_id}] = volume[e];
    return out;
}

AllocationState per_domain_drf(const Scenario& scenario, const AreaWeights& weights,
                               const DesignatedPaths& designated, DrfMode mode) {
    auto ents = drf_entities(scenario, weights, designated);

    std::vector<double> bound(ents.size(), kInf);
    if (mode == DrfMode::weighted)
        for (std::size_t e = 0; e < ents.size(); ++e)
            bound[e] = inverse_marginal(
                ents[e].params->utility,
                opex_unit_cost(scenario, scenario.slice(ents[e].slice_id),
                               scenario.topology.path(ents[e].path_id)));

    for (NetworkDomain domain : {NetworkDomain::core, NetworkDomain::cran, NetworkDomain::ran}) {
        for (const auto& n : scenario.topology.nodes) {
            if (n.domain != domain) continue;
            std::vector<std::size_t> here;
            for (std::size_t e = 0; e < ents.size(); ++e) {
                const PathSpec& p = scenario.topology.path(ents[e].path_id);
                if (std::find(p.nodes.begin(), p.nodes.end(), n.id) != p.nodes.end())
                    here.push_back(e);
            }
            if (here.empty()) continue;

            std::vector<double> capacity(n.capacity.values);
            std::vector<FillEntity> fill(here.size());
            for (std::size_t j = 0; j < here.size(); ++j) {
                const auto& ent = ents[here[j]];
                const DemandVector& d =
                    scenario.slice(ent.slice_id).demand_at(ent.path_id, n.id);
                double fraction = 0.0;
                for (std::size_t r = 0; r < d.size(); ++r) {
                    if (d[r] > 0) {
                        fraction = std::max(fraction, d[r] / n.capacity[r]);
                        fill[j].demand.emplace_back(static_cast<int>(r), d[r]);
                    }
                }
                fill[j].rate = ent.weight / fraction;
                fill[j].cap = bound[here[j]];
            }
            std::vector<double> volume = progressive_fill(fill, capacity);
            for (std::size_t j = 0; j < here.size(); ++j) bound[here[j]] = volume[j];
        }
    }

    AllocationState out;
    for (std::size_t e = 0; e < ents.size(); ++e)
        out.x_path[{ents[e].slice_id, ents[e].path_id}] = bound[e] == kInf ? 0.0 : bound[e];
    return out;
}

std::vector<DominantShareInfo> multi_domain_shares(const Scenario& scenario,
                                                   const AreaWeights& weights,
                                                   const DesignatedPaths& designated,
                                                   const AllocationState& allocation) {
    auto ents = drf_entities(scenario, weights, designated);
    std::vector<DominantShareInfo> out;
    for (const auto& ent : ents) {
        const SliceSpec& s = scenario.slice(ent.slice_id);
        const PathSpec& p = scenario.topology.path(ent.path_id);
        DominantShareInfo info;
        info.slice = ent.slice_id;
        info.area = ent.area;
        info.weight = ent.weight;
        for (int nid : p.nodes) {
            const DemandVector& d = s.demand_at(p.id, nid);
            const NodeSpec& n = scenario.topology.node(nid);
            for (std::size_t r = 0; r < d.size(); ++r) {
                if (d[r] <= 0) continue;
                double f = d[r] / (n.capacity[r] * ent.weight);
                if (f > info.fraction) {
                    info.fraction = f;
                    info.node = nid;
                    info.resource = static_cast<int>(r);
                }
            }
        }
        auto it = allocation.x_path.find({ent.slice_id, ent.path_id});
        info.share = (it == allocation.x_path.end() ? 0.0 : it->second) * info.fraction;
        out.push_back(info);
    }
    return out;
}

double UniformAllocationSpec::node_total(int node) const {
    double total = 0.0;
    for (const auto& [key, w] : weights)
        if (std::get<2>(key) == node) total += w;
    return total;
}

UniformAllocationSpec UniformAllocationSpec::equal_weights(const Scenario& scenario,
                                                           const DesignatedPaths* designated) {
    UniformAllocationSpec spec;
    for (const auto& n : scenario.topology.nodes)
        spec.eta[n.id] = ResourceVector(n.capacity.size(), 1.0);
    for (const auto& s : scenario.slices) {
        for (const auto& [area, params] : s.areas) {
            for (const PathSpec* p : scenario.topology.paths_in_area(area)) {
                if (designated) {
                    auto it = designated->find({s.id, area});
                    if (it == designated->end() || it->second != p->id) continue;
                }
                for (int nid : p->nodes) spec.weights[{s.id, p->id, nid}] = 1.0;
            }
        }
    }
    return spec;
}

UniformAllocationSpec UniformAllocationSpec::from_equilibrium(const Scenario& scenario,
                                                              const AllocationState& allocation,
                                                              const PriceTable& prices) {
    UniformAllocationSpec spec;
    spec.eta = prices.eta;
    spec.weights = path_node_payments(allocation.x_path, prices, scenario);
    return spec;
}

AllocationState uniform_allocation(const Scenario& scenario, const UniformAllocationSpec& spec) {
    std::map<int, double> node_total;
    for (const auto& [key, w] : spec.weights) node_total[std::get<2>(key)] += w;

    // Group the weighted (slice, path) usages.
    std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> usage;
    for (const auto& [key, w] : spec.weights) {
        const auto& [slice, path, node] = key;
        usage[{slice, path}].emplace_back(node, w);
    }

    AllocationState out;
    for (const auto& [sp, nodes] : usage) {
        const auto& [slice_id, path_id] = sp;
        const SliceSpec& s = scenario.slice(slice_id);
        double volume = kInf;
        for (const auto& [nid, w] : nodes) {
            double total = node_total[nid];
            if (!(total > 0) || !(w > 0)) {
                volume = 0.0;
                break;
            }
            const DemandVector& d = s.demand_at(path_id, nid);
            const NodeSpec& n = scenario.topology.node(nid);
            auto eit = spec.eta.find(nid);
            if (eit == spec.eta.end())
                throw structural_error("uniform spec misses node " + std::to_string(nid));
            double gamma = kInf;
            for (std::size_t r = 0; r < d.size(); ++r)
                if (d[r] > 0) gamma = std::min(gamma, eit->second[r] * n.capacity[r] / d[r]);
            volume = std::min(volume, w / total * gamma);
        }
        out.x_path[{slice_id, path_id}] = volume == kInf ? 0.0 : volume;
    }
    return out;
}

std::vector<IncentiveShortfall> sharing_incentive_violation_scan(const AllocationState& allocation,
                                                                 const AllocationState& uniform_baseline) {
    std::map<int, double> mine, theirs;
    for (const auto& [key, x] : allocation.x_path) mine[key.first] += x;
    for (const auto& [key, x] : uniform_baseline.x_path) theirs[key.first] += x;
    std::vector<IncentiveShortfall> out;
    for (const auto& [slice, uni] : theirs) {
        double got = mine.count(slice) ? mine[slice] : 0.0;
        if (got < uni * (1.0 - 1e-9))
            out.push_back({slice, got, uni, uni > 0 ? got / uni : 1.0});
    }
    return out;
}

} // namespace slicenet::baselines
