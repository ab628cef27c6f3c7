#ifndef SLICENET_INDEX_HPP
#define SLICENET_INDEX_HPP

#include <utility>
#include <vector>

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet {

// Dense view of a validated scenario. Every iterative component works on flat
// vectors indexed through this structure:
//   rows     one per (node, resource slot), in node-id order
//   entities one per active (slice, area)
//   pairs    one per active (slice, path)
// All orderings are fixed (sorted ids), so results are reproducible.
class ScenarioIndex {
public:
    struct Pair {
        int slice = -1;   // dense slice index
        int path = -1;    // dense path index
        int entity = -1;  // dense entity index
        std::vector<std::pair<int, double>> coeffs; // (row, demand per unit traffic)
    };

    struct Entity {
        int slice = -1;
        int area = 1;
        const AreaSliceParams* params = nullptr;
        std::vector<int> pairs; // dense pair indices
    };

    explicit ScenarioIndex(const Scenario& scenario);

    const Scenario& scenario() const { return *scenario_; }

    int num_rows() const { return static_cast<int>(row_capacity_.size()); }
    int num_pairs() const { return static_cast<int>(pairs_.size()); }
    int num_entities() const { return static_cast<int>(entities_.size()); }
    int num_nodes() const { return static_cast<int>(scenario_->topology.nodes.size()); }

    const std::vector<Pair>& pairs() const { return pairs_; }
    const std::vector<Entity>& entities() const { return entities_; }

    double row_capacity(int row) const { return row_capacity_[row]; }
    double row_opex(int row) const { return row_opex_[row]; }
    int row_node(int row) const { return row_node_[row]; }      // node id
    int row_resource(int row) const { return row_resource_[row]; } // slot index
    int first_row_of_node(int node_id) const;

    int slice_id(int slice_index) const { return slice_ids_[slice_index]; }
    int path_id(int path_index) const { return path_ids_[path_index]; }
    int slice_index(int slice_id) const;
    int path_index(int path_id) const;
    int pair_index(int slice_id, int path_id) const; // -1 if inactive

    // Aggregate per-row load sum_pairs x * d, in fixed order.
    void accumulate_load(const std::vector<double>& x, std::vector<double>& load) const;

    // Conversions between dense pair vectors and the public map form.
    std::vector<double> dense_from(const PathTraffic& x) const;
    PathTraffic traffic_from(const std::vector<double>& x) const;
    std::vector<double> dense_prices(const PriceTable& prices) const;
    PriceTable price_table(const std::vector<double>& mu, const std::vector<double>& eta) const;

private:
    const Scenario* scenario_;
    std::vector<double> row_capacity_, row_opex_;
    std::vector<int> row_node_, row_resource_;
    std::vector<int> node_row_start_; // aligned with topology.nodes order
    std::vector<int> slice_ids_, path_ids_;
    std::vector<Pair> pairs_;
    std::vector<Entity> entities_;
};

} // namespace slicenet

#endif
