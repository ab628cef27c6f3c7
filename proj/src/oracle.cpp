#include "slicenet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "lstsq.hpp"
#include "slicenet/baselines.hpp"
#include "slicenet/index.hpp"
#include "slicenet/utility.hpp"

namespace slicenet::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Separable concave term per (slice, area): either the scenario's marginal
// family or a payment-weighted log (the proportional-fairness objective).
struct EntityObjective {
    bool log_kind = false;
    double phi = 1.0, alpha = 1.0, z0 = 1.0; // marginal family
    double weight = 0.0;                     // log kind
    bool excluded = false;                   // log kind with zero weight

    double value(double y) const {
        if (excluded) return 0.0;
        if (!(y > 0)) return -kInf;
        if (log_kind) return weight * std::log(y);
        if (alpha == 1.0) return phi * std::log(y / z0);
        double oma = 1.0 - alpha;
        return std::pow(phi, alpha) * std::pow(z0, oma) * std::expm1(oma * std::log(y / z0)) / oma;
    }
    double deriv(double y) const {
        if (excluded) return 0.0;
        return log_kind ? weight / y : std::pow(phi / y, alpha);
    }
    double second(double y) const {
        if (excluded) return 0.0;
        return log_kind ? -weight / (y * y) : -alpha * deriv(y) / y;
    }
};

class ConvexSolver {
public:
    ConvexSolver(const Scenario& scenario, std::vector<EntityObjective> objectives,
                 const SolveOptions& options)
        : scenario_(scenario), ix_(scenario), obj_(std::move(objectives)), opt_(options) {
        P_ = ix_.num_pairs();
        E_ = ix_.num_entities();
        R_ = ix_.num_rows();
        c0_.assign(P_, 0.0);
        for (int k = 0; k < P_; ++k)
            for (const auto& [row, d] : ix_.pairs()[k].coeffs) c0_[k] += d * ix_.row_opex(row);
        row_pairs_.resize(R_);
        for (int k = 0; k < P_; ++k)
            for (const auto& [row, d] : ix_.pairs()[k].coeffs) row_pairs_[row].emplace_back(k, d);
        row_norm2_.assign(R_, 0.0);
        for (int r = 0; r < R_; ++r)
            for (const auto& [k, d] : row_pairs_[r]) row_norm2_[r] += d * d;
    }

    SolveResult run() {
        std::vector<double> x = initial_point();

        std::vector<double> lambda(R_, 0.0);
        SolveResult best;
        double best_residual = kInf;
        int iters_used = 0;

        int chunk = 200;
        for (int round = 0; round < 16 && iters_used <= opt_.max_iters; ++round) {
            if (round > 0) {
                iters_used += ascend(x, std::min(opt_.max_iters - iters_used, chunk));
                chunk = std::min(chunk * 2, 8000);
            }

            std::vector<double> x_try = x, lam_try(R_, 0.0);
            polish(x_try, lam_try);
            SolveResult candidate = package(x_try, lam_try);
            candidate.iterations = std::max(iters_used, 1);
            if (std::getenv("SLICENET_ORACLE_DEBUG"))
                std::fprintf(stderr, "round %d iters %d residual %.3g\n", round, iters_used,
                             candidate.certificate.max_residual());
            if (candidate.certificate.max_residual() < best_residual) {
                best_residual = candidate.certificate.max_residual();
                best = std::move(candidate);
            }
            if (best_residual <= opt_.kkt_tol) break;
            if (iters_used >= opt_.max_iters) break;
        }
        best.converged = best_residual <= opt_.kkt_tol;
        return best;
    }

private:
    // Strictly positive on every path of every included entity (area totals
    // must never hit zero, the marginal there is unbounded), scaled to fit
    // inside the capacity region.
    std::vector<double> initial_point() const {
        std::vector<double> x(P_, 0.0);
        for (int e = 0; e < E_; ++e) {
            if (obj_[e].excluded) continue;
            const auto& ent = ix_.entities()[e];
            double c = 1e300;
            for (int k : ent.pairs) c = std::min(c, c0_[k]);
            c = std::max(c, 1e-300);
            double y0 = obj_[e].log_kind ? obj_[e].weight / c
                                         : obj_[e].phi * std::pow(c, -1.0 / obj_[e].alpha);
            for (int k : ent.pairs) x[k] = y0 / static_cast<double>(ent.pairs.size());
        }
        std::vector<double> load;
        ix_.accumulate_load(x, load);
        double factor = 1.0;
        for (int r = 0; r < R_; ++r)
            if (load[r] > 0) factor = std::min(factor, ix_.row_capacity(r) / load[r]);
        if (factor < 1.0)
            for (double& v : x) v *= 0.95 * factor;
        return x;
    }

    void zero_excluded(std::vector<double>& x) const {
        for (int e = 0; e < E_; ++e)
            if (obj_[e].excluded)
                for (int k : ix_.entities()[e].pairs) x[k] = 0.0;
    }

    void area_totals(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(E_, 0.0);
        for (int k = 0; k < P_; ++k) y[ix_.pairs()[k].entity] += x[k];
    }

    double objective(const std::vector<double>& x) const {
        std::vector<double> y;
        area_totals(x, y);
        double f = 0.0;
        for (int e = 0; e < E_; ++e) {
            double v = obj_[e].value(y[e]);
            if (v == -kInf) return -kInf;
            f += v;
        }
        for (int k = 0; k < P_; ++k) f -= c0_[k] * x[k];
        return f;
    }

    void gradient(const std::vector<double>& x, std::vector<double>& g) const {
        std::vector<double> y;
        area_totals(x, y);
        g.assign(P_, 0.0);
        for (int k = 0; k < P_; ++k) {
            int e = ix_.pairs()[k].entity;
            if (obj_[e].excluded) continue;
            g[k] = obj_[e].deriv(y[e]) - c0_[k];
        }
    }

    // Dykstra's alternating projection onto the orthant and every capacity
    // halfspace. Converges to the Euclidean projection onto the polytope.
    void project(std::vector<double>& x, double tol, int max_cycles) const {
        std::vector<double> p0(P_, 0.0);
        std::vector<std::vector<double>> prow(R_);
        for (int r = 0; r < R_; ++r) prow[r].assign(row_pairs_[r].size(), 0.0);

        for (int cycle = 0; cycle < max_cycles; ++cycle) {
            double moved = 0.0, worst = 0.0;
            for (int j = 0; j < P_; ++j) {
                double t = x[j] + p0[j];
                double y = t > 0 ? t : 0.0;
                p0[j] = t - y;
                moved = std::max(moved, std::abs(y - x[j]));
                x[j] = y;
            }
            for (int r = 0; r < R_; ++r) {
                if (row_pairs_[r].empty()) continue;
                double s = 0.0;
                for (std::size_t i = 0; i < row_pairs_[r].size(); ++i)
                    s += row_pairs_[r][i].second * (x[row_pairs_[r][i].first] + prow[r][i]);
                double viol = s - ix_.row_capacity(r);
                double scale = viol > 0 ? viol / row_norm2_[r] : 0.0;
                for (std::size_t i = 0; i < row_pairs_[r].size(); ++i) {
                    auto [j, d] = row_pairs_[r][i];
                    double t = x[j] + prow[r][i];
                    double y = t - d * scale;
                    prow[r][i] = t - y;
                    moved = std::max(moved, std::abs(y - x[j]));
                    x[j] = y;
                }
                worst = std::max(worst, viol / std::max(1.0, ix_.row_capacity(r)));
            }
            if (moved <= tol && worst <= 1e-12) break;
        }
        for (int j = 0; j < P_; ++j)
            if (x[j] < 0) x[j] = 0.0;
    }

    // Projected gradient ascent with momentum extrapolation, restarted
    // whenever the momentum turns against the gradient, and backtracking on
    // the projection arc.
    int ascend(std::vector<double>& x, int budget) {
        std::vector<double> g, xt, v = x, x_prev = x;
        double t = step_hint_;
        double theta = 1.0;
        int calm = 0, it = 0;
        for (; it < budget; ++it) {
            gradient(v, g);
            double fv = objective(v);
            if (fv == -kInf) { // extrapolated past the domain; restart plainly
                v = x;
                theta = 1.0;
                gradient(v, g);
                fv = objective(v);
            }
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                xt = v;
                for (int j = 0; j < P_; ++j) xt[j] += t * g[j];
                project(xt, 1e-12, 120);
                zero_excluded(xt);
                double ft = objective(xt);
                // quadratic-model condition; v may sit outside the polytope
                double lin = 0.0, dist2 = 0.0;
                for (int j = 0; j < P_; ++j) {
                    double d = xt[j] - v[j];
                    lin += g[j] * d;
                    dist2 += d * d;
                }
                if (ft > -kInf && ft >= fv + lin - dist2 / (2.0 * t)) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
                if (t < 1e-16) break;
            }
            if (!accepted) break;

            double along = 0.0, moved = 0.0, scale = 1.0;
            for (int j = 0; j < P_; ++j) {
                along += g[j] * (xt[j] - x[j]);
                moved = std::max(moved, std::abs(xt[j] - x[j]));
                scale = std::max(scale, xt[j]);
            }
            double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            double beta = (theta - 1.0) / theta_next;
            if (along < 0) { // momentum points uphill of the new iterate
                theta_next = 1.0;
                beta = 0.0;
            }
            x_prev.swap(x);
            x = xt;
            for (int j = 0; j < P_; ++j) v[j] = x[j] + beta * (x[j] - x_prev[j]);
            theta = theta_next;
            t = std::min(t * 1.3, 1e8);
            calm = moved <= 1e-8 * scale ? calm + 1 : 0;
            if (calm >= 4) {
                ++it;
                break;
            }
        }
        step_hint_ = std::max(t, 1e-12);
        return std::max(it, 1);
    }

    // Active-set Newton refinement: solve the stationarity and binding
    // capacity equations exactly, adjusting the sets from the sign pattern.
    void polish(std::vector<double>& x, std::vector<double>& lambda) const {
        std::vector<double> y, load;
        area_totals(x, y);
        ix_.accumulate_load(x, load);

        // Tight starting support: per entity the heaviest paths covering all
        // but a sliver of its volume (at most four); omissions re-enter
        // through the marginal-value check below.
        std::vector<int> support, active_rows;
        std::vector<char> in_support(P_, 0), in_active(R_, 0);
        for (int e = 0; e < E_; ++e) {
            if (obj_[e].excluded) continue;
            std::vector<int> order(ix_.entities()[e].pairs);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return x[a] > x[b] || (x[a] == x[b] && c0_[a] < c0_[b]);
            });
            double covered = 0.0;
            for (std::size_t j = 0; j < order.size(); ++j) {
                if (j > 0 && (j >= 2 || covered >= 0.9999 * y[e])) break;
                support.push_back(order[j]);
                in_support[order[j]] = 1;
                covered += x[order[j]];
            }
        }
        for (int r = 0; r < R_; ++r) {
            if (row_pairs_[r].empty()) continue;
            if (ix_.row_capacity(r) - load[r] <= 1e-5 * std::max(1.0, ix_.row_capacity(r))) {
                active_rows.push_back(r);
                in_active[r] = 1;
            }
        }
        std::sort(support.begin(), support.end());

        lambda.assign(R_, 0.0);
        const bool dbg = std::getenv("SLICENET_ORACLE_DEBUG") != nullptr;
        for (int outer = 0; outer < 16; ++outer) {
            bool ok = newton(x, lambda, support, active_rows);
            if (dbg)
                std::fprintf(stderr, "  polish outer %d: support %zu active %zu newton_ok %d\n",
                             outer, support.size(), active_rows.size(), (int)ok);
            if (!ok) break;

            bool changed = false;
            // Drop multipliers that went negative.
            for (auto it = active_rows.begin(); it != active_rows.end();) {
                if (lambda[*it] < -1e-11) {
                    in_active[*it] = 0;
                    lambda[*it] = 0.0;
                    it = active_rows.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
            // Drop paths that went negative; harmless near-zero paths stay,
            // otherwise the marginal-value check below re-adds them forever.
            for (auto it = support.begin(); it != support.end();) {
                if (x[*it] < -1e-11) {
                    x[*it] = 0.0;
                    in_support[*it] = 0;
                    it = support.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
            if (changed) continue;

            area_totals(x, y);
            ix_.accumulate_load(x, load);
            // Pull in violated rows and paths whose marginal value exceeds
            // their cost, all at once; spurious additions drop out through
            // the sign checks on the next pass.
            for (int r = 0; r < R_; ++r) {
                if (in_active[r] || row_pairs_[r].empty()) continue;
                double rel = (load[r] - ix_.row_capacity(r)) / std::max(1.0, ix_.row_capacity(r));
                if (rel > 1e-9) {
                    active_rows.push_back(r);
                    in_active[r] = 1;
                    changed = true;
                }
            }
            for (int k = 0; k < P_; ++k) {
                int e = ix_.pairs()[k].entity;
                if (in_support[k] || obj_[e].excluded) continue;
                double cost = c0_[k];
                for (const auto& [row, d] : ix_.pairs()[k].coeffs) cost += d * lambda[row];
                double gain = (obj_[e].deriv(std::max(y[e], 1e-300)) - cost) / std::max(cost, 1e-12);
                if (gain > 1e-9) {
                    support.push_back(k);
                    in_support[k] = 1;
                    changed = true;
                }
            }
            if (changed) {
                std::sort(support.begin(), support.end());
                continue;
            }
            break;
        }
        for (int j = 0; j < P_; ++j)
            if (x[j] < 0) x[j] = 0.0;
        for (int r = 0; r < R_; ++r)
            if (lambda[r] < 0) lambda[r] = 0.0;
    }

    bool newton(std::vector<double>& x, std::vector<double>& lambda,
                const std::vector<int>& support, const std::vector<int>& active_rows) const {
        const int ns = static_cast<int>(support.size());
        const int na = static_cast<int>(active_rows.size());
        const int n = ns + na;
        if (n == 0 || n > 700) return false;

        std::vector<int> row_slot(R_, -1);
        for (int i = 0; i < na; ++i) row_slot[active_rows[i]] = i;
        std::vector<int> pair_slot(P_, -1);
        for (int i = 0; i < ns; ++i) pair_slot[support[i]] = i;

        std::vector<double> y;
        double gbest = std::numeric_limits<double>::infinity();
        int flat = 0;
        for (int iter = 0; iter < 15; ++iter) {
            area_totals(x, y);
            std::vector<double> G(n, 0.0);
            for (int i = 0; i < ns; ++i) {
                int k = support[i];
                int e = ix_.pairs()[k].entity;
                double cost = c0_[k];
                for (const auto& [row, d] : ix_.pairs()[k].coeffs)
                    if (row_slot[row] >= 0) cost += d * lambda[row];
                G[i] = obj_[e].deriv(std::max(y[e], 1e-300)) - cost;
            }
            std::vector<double> load;
            ix_.accumulate_load(x, load);
            for (int i = 0; i < na; ++i)
                G[ns + i] = ix_.row_capacity(active_rows[i]) - load[active_rows[i]];

            double gmax = 0.0;
            for (int i = 0; i < ns; ++i) gmax = std::max(gmax, std::abs(G[i]) / std::max(1.0, c0_[support[i]]));
            for (int i = 0; i < na; ++i)
                gmax = std::max(gmax, std::abs(G[ns + i]) / std::max(1.0, ix_.row_capacity(active_rows[i])));
            if (gmax <= 1e-13) return true;
            if (gmax < 0.7 * gbest) {
                gbest = gmax;
                flat = 0;
            } else if (++flat >= 3) {
                return true; // stalled; let the sign checks decide
            }

            // J = [ U'' block  -D^T ; -D  0 ], column-major
            std::vector<double> J(static_cast<std::size_t>(n) * n, 0.0);
            for (int col = 0; col < ns; ++col) {
                int kc = support[col];
                int e = ix_.pairs()[kc].entity;
                double u2 = obj_[e].second(std::max(y[e], 1e-300));
                for (int rowi = 0; rowi < ns; ++rowi)
                    if (ix_.pairs()[support[rowi]].entity == e) J[col * n + rowi] = u2;
                for (const auto& [row, d] : ix_.pairs()[kc].coeffs)
                    if (row_slot[row] >= 0) J[col * n + ns + row_slot[row]] = -d;
            }
            for (int col = 0; col < na; ++col) {
                int r = active_rows[col];
                for (const auto& [k, d] : row_pairs_[r])
                    if (pair_slot[k] >= 0) J[(ns + col) * n + pair_slot[k]] = -d;
            }

            std::vector<double> rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = -G[i];
            std::vector<double> delta = detail::lstsq(J, n, n, rhs, 1e-14);

            // keep area totals positive
            double theta = 1.0;
            std::vector<double> dy(E_, 0.0);
            for (int i = 0; i < ns; ++i) dy[ix_.pairs()[support[i]].entity] += delta[i];
            for (int e = 0; e < E_; ++e)
                if (dy[e] < 0 && y[e] + dy[e] < 0.1 * y[e])
                    theta = std::min(theta, -0.9 * y[e] / dy[e]);
            for (int i = 0; i < ns; ++i) x[support[i]] += theta * delta[i];
            for (int i = 0; i < na; ++i) lambda[active_rows[i]] += theta * delta[ns + i];
            if (!std::isfinite(theta)) return false;
        }
        return true; // leave the sign checks to the caller
    }

    SolveResult package(std::vector<double>& x, const std::vector<double>& lambda) const {
        std::vector<double> mu(R_), load;
        for (int r = 0; r < R_; ++r) mu[r] = ix_.row_opex(r) + std::max(lambda[r], 0.0);
        ix_.accumulate_load(x, load);
        std::vector<double> eta(R_, 0.0);
        for (int r = 0; r < R_; ++r)
            if (ix_.row_capacity(r) > 0) eta[r] = std::min(load[r] / ix_.row_capacity(r), 1.0);

        SolveResult out;
        out.allocation.x_path = ix_.traffic_from(x);
        out.prices = ix_.price_table(mu, eta);
        out.certificate = residual_dense(x, mu);
        out.objective = objective(x);
        return out;
    }

    KktCertificate residual_dense(const std::vector<double>& x, const std::vector<double>& mu) const;

    const Scenario& scenario_;
    ScenarioIndex ix_;
    std::vector<EntityObjective> obj_;
    SolveOptions opt_;
    int P_ = 0, E_ = 0, R_ = 0;
    std::vector<double> c0_;
    std::vector<std::vector<std::pair<int, double>>> row_pairs_;
    std::vector<double> row_norm2_;
    double step_hint_ = 1.0;
};

KktCertificate residual_impl(const ScenarioIndex& ix, const std::vector<EntityObjective>& obj,
                             const std::vector<double>& x, const std::vector<double>& mu) {
    KktCertificate cert;
    std::vector<double> y(ix.num_entities(), 0.0), load;
    for (int k = 0; k < ix.num_pairs(); ++k) y[ix.pairs()[k].entity] += x[k];
    ix.accumulate_load(x, load);

    for (int k = 0; k < ix.num_pairs(); ++k) {
        const auto& pair = ix.pairs()[k];
        if (obj[pair.entity].excluded) continue;
        double cost = 0.0;
        for (const auto& [row, d] : pair.coeffs) cost += d * mu[row];
        double uprime = y[pair.entity] > 0 ? obj[pair.entity].deriv(y[pair.entity]) : kInf;
        double nu = std::max(0.0, cost - uprime);
        cert.nu[{ix.slice_id(pair.slice), ix.path_id(pair.path)}] = nu;
        bool carrying = x[k] > 1e-3 * y[pair.entity] && x[k] > 0;
        double rel;
        if (carrying) {
            rel = std::abs(uprime - cost) / cost;
        } else {
            rel = std::max(0.0, uprime - cost) / cost;
        }
        cert.stationarity = std::max(cert.stationarity, rel);
        if (y[pair.entity] > 0)
            cert.complementary_slackness =
                std::max(cert.complementary_slackness, nu * x[k] / (cost * y[pair.entity]));
    }
    for (int r = 0; r < ix.num_rows(); ++r) {
        double cap = ix.row_capacity(r);
        if (!(cap > 0)) continue;
        double lam = std::max(0.0, mu[r] - ix.row_opex(r));
        cert.lambda[{ix.row_node(r), ix.row_resource(r)}] = lam;
        cert.primal_feasibility = std::max(cert.primal_feasibility, (load[r] - cap) / cap);
        cert.complementary_slackness =
            std::max(cert.complementary_slackness, lam * std::abs(cap - load[r]) / (mu[r] * cap));
    }
    cert.primal_feasibility = std::max(cert.primal_feasibility, 0.0);
    return cert;
}

KktCertificate ConvexSolver::residual_dense(const std::vector<double>& x,
                                            const std::vector<double>& mu) const {
    return residual_impl(ix_, obj_, x, mu);
}

std::vector<EntityObjective> scenario_objectives(const ScenarioIndex& ix) {
    std::vector<EntityObjective> obj(ix.num_entities());
    for (int e = 0; e < ix.num_entities(); ++e) {
        const UtilityParams& u = ix.entities()[e].params->utility;
        obj[e].phi = u.phi;
        obj[e].alpha = u.alpha;
        obj[e].z0 = reference_traffic(u);
    }
    return obj;
}

} // namespace

double KktCertificate::max_residual() const {
    return std::max({stationarity, complementary_slackness, primal_feasibility});
}

SolveResult solve_problem1(const Scenario& scenario, const SolveOptions& options) {
    ScenarioIndex ix(scenario);
    ConvexSolver solver(scenario, scenario_objectives(ix), options);
    return solver.run();
}

SolveResult solve_problem3(const Scenario& scenario, const AreaPayments& payments,
                           const SolveOptions& options) {
    ScenarioIndex ix(scenario);
    std::vector<EntityObjective> obj(ix.num_entities());
    for (int e = 0; e < ix.num_entities(); ++e) {
        const auto& ent = ix.entities()[e];
        auto it = payments.find({ix.slice_id(ent.slice), ent.area});
        double w = it == payments.end() ? 0.0 : it->second;
        if (w < 0) throw std::domain_error("solve_problem3: negative payment weight");
        obj[e].log_kind = true;
        obj[e].weight = w;
        obj[e].excluded = !(w > 0);
    }
    ConvexSolver solver(scenario, std::move(obj), options);
    return solver.run();
}

KktCertificate kkt_residual(const AllocationState& allocation, const PriceTable& prices,
                            const Scenario& scenario) {
    ScenarioIndex ix(scenario);
    return residual_impl(ix, scenario_objectives(ix), ix.dense_from(allocation.x_path),
                         ix.dense_prices(prices));
}

std::map<std::pair<int, int>, double> problem1_gradient(const Scenario& scenario,
                                                        const PathTraffic& x_path) {
    ScenarioIndex ix(scenario);
    std::vector<double> x = ix.dense_from(x_path);
    std::vector<double> y(ix.num_entities(), 0.0);
    for (int k = 0; k < ix.num_pairs(); ++k) y[ix.pairs()[k].entity] += x[k];
    std::map<std::pair<int, int>, double> out;
    for (int k = 0; k < ix.num_pairs(); ++k) {
        const auto& pair = ix.pairs()[k];
        const UtilityParams& u = ix.entities()[pair.entity].params->utility;
        double c0 = 0.0;
        for (const auto& [row, d] : pair.coeffs) c0 += d * ix.row_opex(row);
        out[{ix.slice_id(pair.slice), ix.path_id(pair.path)}] =
            marginal_utility(u, y[pair.entity]) - c0;
    }
    return out;
}

EnvyReport check_envy_freeness(const AllocationState& allocation, const AreaPayments& payments,
                               const Scenario& scenario) {
    const auto& topo = scenario.topology;
    AreaTraffic totals = aggregate_area_traffic(allocation.x_path, topo);
    EnvyReport report;

    for (int area = 1; area <= topo.num_areas; ++area) {
        auto paths = topo.paths_in_area(area);
        for (const auto& envious : scenario.slices) {
            if (!envious.areas.count(area)) continue;
            auto wn = payments.find({envious.id, area});
            if (wn == payments.end() || !(wn->second > 0)) continue;
            double xn = totals.count({envious.id, area}) ? totals.at({envious.id, area}) : 0.0;
            for (const auto& envied : scenario.slices) {
                if (envied.id == envious.id || !envied.areas.count(area)) continue;
                auto wm = payments.find({envied.id, area});
                if (wm == payments.end() || !(wm->second > 0)) continue;
                double xm = totals.count({envied.id, area}) ? totals.at({envied.id, area}) : 0.0;
                for (const PathSpec* p : paths) {
                    // only paths the envied slice genuinely carries traffic on
                    auto xit = allocation.x_path.find({envied.id, p->id});
                    if (xit == allocation.x_path.end() || !(xit->second > 1e-3 * xm)) continue;
                    // strict preference must hold on every demanded slot
                    double margin = kInf;
                    bool any_slot = false;
                    for (int nid : p->nodes) {
                        const DemandVector& dn = envious.demand_at(p->id, nid);
                        const DemandVector& dm = envied.demand_at(p->id, nid);
                        for (std::size_t r = 0; r < dn.size(); ++r) {
                            if (dn[r] <= 0 && dm[r] <= 0) continue;
                            any_slot = true;
                            double lhs = xn * dn[r] / wn->second;
                            double rhs = xm * dm[r] / wm->second;
                            if (!(lhs < rhs * (1.0 - 1e-9))) {
                                margin = -kInf;
                            } else {
                                margin = std::min(margin, (rhs - lhs) / rhs);
                            }
                        }
                    }
                    if (any_slot && margin > 0 && margin != kInf) {
                        report.envy_free = false;
                        if (!report.worst || margin > report.worst->margin)
                            report.worst = EnvyWitness{area, envious.id, envied.id, p->id, margin};
                    }
                }
            }
        }
    }
    return report;
}

SharingIncentiveReport check_sharing_incentive(const AllocationState& allocation,
                                               const PriceTable& prices, const Scenario& scenario) {
    auto spec = baselines::UniformAllocationSpec::from_equilibrium(scenario, allocation, prices);
    AllocationState uniform = baselines::uniform_allocation(scenario, spec);

    std::map<std::pair<int, int>, double> path_payment; // (slice, path) -> w^{p*}_n
    for (const auto& [key, w] : spec.weights)
        path_payment[{std::get<0>(key), std::get<1>(key)}] += w;

    SharingIncentiveReport report;
    for (const auto& [key, wp] : path_payment) {
        if (!(wp > 0)) continue;
        double mine = allocation.x_path.count(key) ? allocation.x_path.at(key) : 0.0;
        double uni = uniform.x_path.count(key) ? uniform.x_path.at(key) : 0.0;
        if (mine < uni * (1.0 - 1e-9)) {
            report.holds = false;
            report.violations.push_back({key.first, key.second, mine, uni});
        }
    }
    return report;
}

PropertyReport evaluate_properties(const AllocationState& allocation, const PriceTable& prices,
                                   const Scenario& scenario) {
    PropertyReport out;
    out.envy = check_envy_freeness(allocation, area_payments(allocation.x_path, prices, scenario),
                                   scenario);
    out.sharing = check_sharing_incentive(allocation, prices, scenario);
    out.welfare = social_welfare(scenario, allocation.x_path);
    return out;
}

NeCheckResult brute_force_ne_check(const Scenario& scenario, const AllocationState& allocation,
                                   const PriceTable& prices, const DeviationGrid& grid) {
    if (!(grid.step > 0) || !(grid.x_max > 0))
        throw std::domain_error("brute_force_ne_check: grid step and bound must be positive");
    NeCheckResult result;
    const int points = static_cast<int>(std::floor(grid.x_max / grid.step)) + 1;

    for (const auto& slice : scenario.slices) {
        // this slice's paths, grouped by area, with fixed unit costs
        std::vector<int> path_ids;
        std::vector<int> path_area;
        std::vector<double> unit_cost;
        for (const auto& [area, params] : slice.areas) {
            for (const PathSpec* p : scenario.topology.paths_in_area(area)) {
                path_ids.push_back(p->id);
                path_area.push_back(area);
                unit_cost.push_back(path_unit_cost(*p, slice, prices));
            }
        }
        const std::size_t dims = path_ids.size();
        double total_points = std::pow(static_cast<double>(points), static_cast<double>(dims));
        if (total_points > 1e7)
            throw std::domain_error("brute_force_ne_check: deviation grid too large");

        auto slice_payoff = [&](const std::vector<double>& xs) {
            std::map<int, double> area_total;
            double payment = 0.0;
            for (std::size_t i = 0; i < dims; ++i) {
                area_total[path_area[i]] += xs[i];
                payment += xs[i] * unit_cost[i];
            }
            double gained = 0.0;
            for (const auto& [area, total] : area_total) {
                const UtilityParams& u = slice.areas.at(area).utility;
                if (total > 0)
                    gained += utility_value(u, total);
                else if (u.alpha >= 1.0)
                    return -kInf;
                else
                    gained -= std::pow(u.phi, u.alpha) *
                              std::pow(reference_traffic(u), 1.0 - u.alpha) / (1.0 - u.alpha);
            }
            return gained - payment;
        };

        std::vector<double> base(dims, 0.0);
        for (std::size_t i = 0; i < dims; ++i) {
            auto it = allocation.x_path.find({slice.id, path_ids[i]});
            base[i] = it == allocation.x_path.end() ? 0.0 : it->second;
        }
        double base_payoff = slice_payoff(base);

        std::vector<int> odo(dims, 0);
        std::vector<double> cand(dims, 0.0);
        while (true) {
            for (std::size_t i = 0; i < dims; ++i) cand[i] = odo[i] * grid.step;
            double gain = slice_payoff(cand) - base_payoff;
            if (gain > grid.tol && gain > result.gain) {
                result.is_equilibrium = false;
                result.slice = slice.id;
                result.gain = gain;
            }
            std::size_t d = 0;
            while (d < dims && ++odo[d] >= points) odo[d++] = 0;
            if (d == dims) break;
            if (dims == 0) break;
        }
        if (dims == 0) continue;
    }
    return result;
}

} // namespace slicenet::oracle
