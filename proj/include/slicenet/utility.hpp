#ifndef SLICENET_UTILITY_HPP
#define SLICENET_UTILITY_HPP

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet {

// Marginal benefit U'(z) = (phi/z)^alpha. Strictly decreasing in z.
double marginal_utility(const UtilityParams& p, double z);

// Inverse of the marginal benefit: the traffic volume at which the marginal
// benefit equals y. Returns phi * y^(-1/alpha).
double inverse_marginal(const UtilityParams& p, double y);

// Reference point z0 at which U(z0) = 0. Utilities are antiderivatives of the
// marginal benefit and are only meaningful in differences; a common reference
// keeps welfare comparable across mechanisms.
inline double reference_traffic(const UtilityParams& p) { return p.phi / 100.0; }

double utility_value(const UtilityParams& p, double z);

// End-to-end delay estimate for provisioned capacity x against admitted load
// phi. Finite only for x > phi; the degenerate region is an explicit sentinel
// so it never leaks into arithmetic.
struct Delay {
    double seconds = 0.0;
    bool infinite = false;

    static Delay unbounded() { return {0.0, true}; }
};

Delay delay(const DelayParams& d, const UtilityParams& p, double x);

// Utility less the delay penalty beta * D(x). Negative-infinite in the region
// where the delay diverges (only when beta > 0).
struct Revenue {
    double value = 0.0;
    bool neg_infinite = false;
};

Revenue net_revenue(const UtilityParams& p, const DelayParams& d, double x);

// Gained utility minus total payment at the given prices.
// Returns -inf when some active area receives zero traffic and its utility
// diverges there (alpha >= 1).
double payoff(const SliceSpec& slice, const PathTraffic& x_path, const PriceTable& prices,
              const TopologySpec& topology);

// System-wide objective: total utility minus total operating cost.
double social_welfare(const Scenario& scenario, const PathTraffic& x_path);

} // namespace slicenet

#endif
