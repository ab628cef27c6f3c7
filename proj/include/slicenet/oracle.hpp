#ifndef SLICENET_ORACLE_HPP
#define SLICENET_ORACLE_HPP

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "slicenet/model.hpp"
#include "slicenet/prices.hpp"

namespace slicenet::oracle {

// Residuals are relative, infinity-norm:
//   stationarity           |U'(y) - path cost| / path cost on carrying paths,
//                          max(0, U' - cost) / cost on unused ones (a path is
//                          "unused" below 0.1% of its area volume),
//   complementary_slackness max of lambda*(C - load)/(mu*C) over rows and
//                          nu*x/(cost*y) over paths,
//   primal_feasibility     max(0, load - C)/C.
struct KktCertificate {
    double stationarity = 0.0;
    double complementary_slackness = 0.0;
    double primal_feasibility = 0.0;
    std::map<std::pair<int, int>, double> lambda; // (node, resource slot) -> capacity multiplier
    std::map<std::pair<int, int>, double> nu;     // (slice, path) -> non-negativity multiplier

    double max_residual() const;
    bool passes(double tol) const { return max_residual() <= tol; }
};

struct SolveOptions {
    int max_iters = 200000;  // gradient-ascent iteration cap
    double kkt_tol = 1e-8;   // certificate target after the polish
};

struct SolveResult {
    AllocationState allocation;
    PriceTable prices; // opex plus capacity multipliers
    KktCertificate certificate;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false; // certificate within tolerance
};

// Welfare maximization (total utility minus operating cost) over the capacity
// polytope, by projected gradient ascent with an active-set Newton polish.
SolveResult solve_problem1(const Scenario& scenario, const SolveOptions& options = {});

// Payment-weighted proportional fairness with the same cost term and
// constraints. Entries with zero payment receive zero traffic.
SolveResult solve_problem3(const Scenario& scenario, const AreaPayments& payments,
                           const SolveOptions& options = {});

// Pure evaluation of the first-order conditions at (x, mu) with
// lambda := mu - opex and nu reconstructed from stationarity slack.
KktCertificate kkt_residual(const AllocationState& allocation, const PriceTable& prices,
                            const Scenario& scenario);

// Analytic gradient of the welfare objective, for finite-difference checks.
std::map<std::pair<int, int>, double> problem1_gradient(const Scenario& scenario,
                                                        const PathTraffic& x_path);

struct EnvyWitness {
    int area = -1;
    int envious = -1;
    int envied = -1;
    int path = -1;
    double margin = 0.0;
};

struct EnvyReport {
    bool envy_free = true;
    std::optional<EnvyWitness> worst;
};

// A slice envies another if, on some carrying path, every payment-normalized
// resource holding of the other slice strictly exceeds its own.
EnvyReport check_envy_freeness(const AllocationState& allocation, const AreaPayments& payments,
                               const Scenario& scenario);

struct ShareWitness {
    int slice = -1;
    int path = -1;
    double allocated = 0.0;
    double uniform = 0.0;
};

struct SharingIncentiveReport {
    bool holds = true;
    std::vector<ShareWitness> violations;
};

// Compares each paying (slice, path) against the payment-weighted uniform
// split of the utilized capacity.
SharingIncentiveReport check_sharing_incentive(const AllocationState& allocation,
                                               const PriceTable& prices, const Scenario& scenario);

struct PropertyReport {
    EnvyReport envy;
    SharingIncentiveReport sharing;
    double welfare = 0.0;
};

PropertyReport evaluate_properties(const AllocationState& allocation, const PriceTable& prices,
                                   const Scenario& scenario);

struct DeviationGrid {
    double step = 0.01;
    double x_max = 0.0;   // per-path search bound
    double tol = 1e-6;    // payoff-improvement tolerance
};

struct NeCheckResult {
    bool is_equilibrium = true;
    int slice = -1;        // first slice with a profitable deviation
    double gain = 0.0;
};

// Grid search over each slice's unilateral deviations at fixed prices.
// Intended for tiny instances; the joint grid must stay below 10^7 points.
NeCheckResult brute_force_ne_check(const Scenario& scenario, const AllocationState& allocation,
                                   const PriceTable& prices, const DeviationGrid& grid);

} // namespace slicenet::oracle

#endif
