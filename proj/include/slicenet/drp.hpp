#ifndef SLICENET_DRP_HPP
#define SLICENET_DRP_HPP

#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet::drp {

struct DrpConfig {
    double epsilon = 1e-3;   // threshold on max over (slice, area) of |x_{n,l} - x*_{n,l}|
    double step = 0.1;       // per-slice relaxation in (0, 1)
    int max_iters = 5000;
    double zeta = 0.9;       // admitted-traffic back-off in (0, 1)
    bool budget_enforcement = false;
    double tie_tol = 1e-9;   // relative band for "least expensive path" ties
    // Effective step at round t is step / (1 + t / step_decay). The exact
    // argmin path choice flips whole area volumes between substitutable paths
    // whenever prices wobble; the decay damps that swing towards zero while
    // keeping the total step mass unbounded. Zero disables the decay.
    double step_decay = 100.0;
    // Once the deviation stalls (the flapping signature), the per-area volume
    // is split over paths with weights exp(-gap / temperature) instead of the
    // hard argmin, temperature = max(split_temp * step, split_temp_floor).
    // Any split over minimum-cost paths is payoff-optimal; the floor keeps the
    // split smooth against the residual price wobble, which itself decays
    // with the step.
    double split_temp = 0.05;
    double split_temp_floor = 2e-5;
    PathTraffic initial_x;   // empty -> start from zero
};

enum class StopReason { threshold, max_iters };

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> deviations; // one entry per iteration
    double kkt_residual = std::numeric_limits<double>::quiet_NaN(); // filled by the certifier
    StopReason terminated_by = StopReason::threshold;

    bool converged() const { return terminated_by == StopReason::threshold; }
};

// Per-iteration trace rows; column meanings match the CSV the CLI writes.
struct TraceSink {
    std::function<void(int iter, int slice, int area, double x, double min_cost, double payment)>
        slice_row;
    std::function<void(int iter, int node, int resource, double mu, double eta)> node_row;
};

struct DrpResult {
    AllocationState allocation;
    PriceTable prices;
    BidMatrix bids;
    ConvergenceReport report;
    AreaPayments payments;                        // w_{n,l} at the returned state
    std::map<std::pair<int, int>, double> admitted_phi; // (slice, area) -> phi after back-off
};

// Desired traffic per path at the given prices: the area volume that equates
// marginal benefit with the cheapest path cost, split uniformly across the
// paths within the tie band.
PathTraffic slice_best_response(const SliceSpec& slice, const PriceTable& prices,
                                const TopologySpec& topology, double tie_tol = 1e-9);

PathTraffic relaxed_update(const PathTraffic& current, const PathTraffic& target, double step);

// Payments of one slice at the given prices and traffic.
BidMatrix compute_bids(const SliceSpec& slice, const PathTraffic& x_path, const PriceTable& prices,
                       const TopologySpec& topology);

struct NodePriceUpdate {
    ResourceVector mu_hat;
    ResourceVector eta;
};

// Cost-floored market clearing for one node given total incoming payments.
NodePriceUpdate node_price_update(const NodeSpec& node, const ResourceVector& total_bids);

// Traffic that survives a price move: scale each path by the smallest
// old/new price ratio over the resources the slice actually demands, never
// above 1.
PathTraffic actual_traffic(const PathTraffic& x_path, const PriceTable& old_prices,
                           const PriceTable& new_prices, const Scenario& scenario);

// Admission back-off: shrink the admitted volume while payments exceed budget.
inline double budget_admission_control(double phi, double area_payment, double budget, double zeta) {
    return area_payment > budget ? zeta * phi : phi;
}

DrpResult run_auction(const Scenario& scenario, const DrpConfig& config,
                      const TraceSink* trace = nullptr);

} // namespace slicenet::drp

#endif
