#ifndef SLICENET_MODEL_HPP
#define SLICENET_MODEL_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "slicenet/common.hpp"

namespace slicenet {

// Per-resource quantities at a single node. Entry order follows the node's
// declared resource slots; the layout is fixed per node, so vectors from
// different nodes must never be combined slot-wise.
struct ResourceVector {
    std::vector<double> values;

    ResourceVector() = default;
    explicit ResourceVector(std::vector<double> v) : values(std::move(v)) {}
    ResourceVector(std::initializer_list<double> v) : values(v) {}
    ResourceVector(std::size_t n, double fill) : values(n, fill) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t r) const { return values[r]; }
    double& operator[](std::size_t r) { return values[r]; }
    bool operator==(const ResourceVector&) const = default;
};

// Resources consumed per unit of traffic (resource units per Gb/s).
using DemandVector = ResourceVector;

enum class NetworkDomain : int { ran = 1, cran = 2, core = 3 };

const char* domain_name(NetworkDomain d);

struct NodeSpec {
    int id = -1;
    NetworkDomain domain = NetworkDomain::ran;
    std::vector<std::string> resources; // slot labels, size M
    ResourceVector capacity;            // size M
    ResourceVector opex;                // currency per resource-unit per time-unit, size M
};

// A forwarding chain from an origin area towards the core: at most one node
// per domain, ordered RAN -> CRAN -> CN.
struct PathSpec {
    int id = -1;
    int area = -1; // 1-based origin area
    std::vector<int> nodes;
};

struct TopologySpec {
    int num_areas = 0;
    std::vector<NodeSpec> nodes;
    std::vector<PathSpec> paths;

    const NodeSpec& node(int id) const;
    const PathSpec& path(int id) const;
    std::vector<const PathSpec*> paths_in_area(int area) const;
};

struct UtilityParams {
    double phi = 1.0;   // traffic-demand scale, Gb/s, > 0
    double alpha = 1.0; // marginal-benefit shape, > 0
};

struct DelayParams {
    double packet_bits = 12000.0; // average packet length L
    double hops = 3.0;            // processing steps per packet
    double beta = 0.0;            // delay-to-profit weight
};

struct AreaSliceParams {
    UtilityParams utility;
    double budget = 0.0; // currency per area
    DelayParams delay;
};

struct SliceSpec {
    int id = -1;
    std::map<int, AreaSliceParams> areas;              // area -> params; keys are the active areas
    std::map<std::pair<int, int>, DemandVector> demand; // (path id, node id) -> demand

    const DemandVector& demand_at(int path, int node) const;
    const DemandVector* find_demand(int path, int node) const;
};

struct Scenario {
    TopologySpec topology;
    std::vector<SliceSpec> slices;

    const SliceSpec& slice(int id) const;
};

// Structural validation: id uniqueness, path node references, vector sizes,
// per-area demand completeness, and strictly positive OPEX on every resource
// slot referenced by a nonzero demand entry.
void validate(const Scenario& scenario);

using PathTraffic = std::map<std::pair<int, int>, double>; // (slice, path) -> Gb/s
using AreaTraffic = std::map<std::pair<int, int>, double>; // (slice, area) -> Gb/s
using NodeAllocation = std::map<std::pair<int, int>, ResourceVector>; // (slice, node)

struct PriceTable; // defined in prices.hpp

// Per-area traffic totals from per-path traffic.
AreaTraffic aggregate_area_traffic(const PathTraffic& x_path, const TopologySpec& topology);

// Resources drawn by each slice from each node under the given path traffic.
NodeAllocation node_allocation(const PathTraffic& x_path, const std::vector<SliceSpec>& slices,
                               const TopologySpec& topology);

struct ResourceViolation {
    int node = -1;
    int resource = -1;
    double overload = 0.0; // aggregate demand minus capacity
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<ResourceViolation> violations;
};

inline constexpr double kFeasibilityTol = 1e-9; // relative to capacity

FeasibilityReport check_feasibility(const PathTraffic& x_path, const std::vector<SliceSpec>& slices,
                                    const TopologySpec& topology);

// Cost of forwarding one unit of traffic over a path at the given prices.
double path_unit_cost(const PathSpec& path, const SliceSpec& slice, const PriceTable& prices);

// Recovers a demand vector from an initial estimate and the observed
// utilization of resources provisioned proportionally to that estimate.
// The returned vector is scaled so the most-utilized resource keeps its
// estimated value (min_r estimate_r / d_r = 1).
DemandVector infer_demand_vector(const DemandVector& estimate, const std::vector<double>& utilization);

// Per-path traffic plus derived views. Derived values are recomputed from
// x_path by the same routines used for scratch computation, so maintained
// and recomputed views agree exactly.
struct AllocationState {
    PathTraffic x_path;

    AreaTraffic area_traffic(const TopologySpec& topology) const {
        return aggregate_area_traffic(x_path, topology);
    }
    NodeAllocation node_alloc(const Scenario& s) const {
        return node_allocation(x_path, s.slices, s.topology);
    }
    double slice_total(int slice) const;
};

} // namespace slicenet

#endif
