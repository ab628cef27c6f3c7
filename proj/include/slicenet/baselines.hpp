#ifndef SLICENET_BASELINES_HPP
#define SLICENET_BASELINES_HPP

#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet::baselines {

// weighted: shares are payment-weighted and growth stops at the volume where
//           the marginal benefit drops to the raw operating cost of the
//           designated path.
// equal_greedy: unit weights, no satiation cap.
enum class DrfMode { weighted, equal_greedy };

using DesignatedPaths = std::map<std::pair<int, int>, int>; // (slice, area) -> path id
using AreaWeights = std::map<std::pair<int, int>, double>;  // (slice, area) -> weight

// One path per (slice, area): the path with the largest standalone bottleneck
// volume min_{i in p} min_r C/d; ties break to the lowest path id.
DesignatedPaths designated_paths(const Scenario& scenario);

// Dominant-share bookkeeping for reports and equalization checks.
struct DominantShareInfo {
    int slice = -1;
    int area = -1;
    int node = -1;     // dominant node (per-domain variant: the node scoped to)
    int resource = -1; // dominant resource slot at that node
    double fraction = 0.0; // max over scope of d / (C * w)
    double weight = 1.0;
    double share = 0.0;    // volume * fraction
};

struct UniformAllocationSpec {
    std::map<int, ResourceVector> eta;                  // node -> utilized fraction
    std::map<std::tuple<int, int, int>, double> weights; // (slice, path, node) -> payment weight

    double node_total(int node) const; // W*_i

    // Full capacity split by unit weights over the given (slice, path) usage.
    static UniformAllocationSpec equal_weights(const Scenario& scenario,
                                               const DesignatedPaths* designated = nullptr);
    // Utilized capacity split by the payments embedded in an equilibrium.
    static UniformAllocationSpec from_equilibrium(const Scenario& scenario,
                                                  const AllocationState& allocation,
                                                  const PriceTable& prices);
};

// Every (slice, path) gets, at each node, its payment share of the utilized
// resources; the path volume is the tightest node's bottleneck on that share.
AllocationState uniform_allocation(const Scenario& scenario, const UniformAllocationSpec& spec);

AllocationState multi_domain_drf(const Scenario& scenario, const AreaWeights& weights,
                                 const DesignatedPaths& designated,
                                 DrfMode mode = DrfMode::weighted);

AllocationState per_domain_drf(const Scenario& scenario, const AreaWeights& weights,
                               const DesignatedPaths& designated, DrfMode mode = DrfMode::weighted);

std::vector<DominantShareInfo> multi_domain_shares(const Scenario& scenario,
                                                   const AreaWeights& weights,
                                                   const DesignatedPaths& designated,
                                                   const AllocationState& allocation);

struct IncentiveShortfall {
    int slice = -1;
    double allocated = 0.0;
    double uniform = 0.0;
    double ratio = 0.0; // allocated / uniform
};

// Slices receiving less total volume than under the uniform baseline.
std::vector<IncentiveShortfall> sharing_incentive_violation_scan(const AllocationState& allocation,
                                                                 const AllocationState& uniform_baseline);

// Water-filling primitive shared by both DRF variants: every entity grows at
// its rate until a resource saturates (freezing everyone with demand on it)
// or the entity hits its cap. Order-independent by construction.
struct FillEntity {
    double rate = 1.0; // volume growth per unit fill level
    double cap = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> demand; // (resource index, per-volume coefficient)
};

std::vector<double> progressive_fill(const std::vector<FillEntity>& entities,
                                     const std::vector<double>& capacity);

} // namespace slicenet::baselines

#endif
