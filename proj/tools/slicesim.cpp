// Command-line front end: run the provisioning mechanisms on a generated or
// file-provided scenario and emit metrics, traces, and scenario documents.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicenet/harness.hpp"
#include "slicenet/scenario_io.hpp"

using namespace slicenet;

namespace {

std::vector<harness::Mechanism> parse_mechanisms(const std::string& arg) {
    using harness::Mechanism;
    if (arg == "all")
        return {Mechanism::drp, Mechanism::md_drf, Mechanism::pd_drf, Mechanism::uniform};
    if (arg == "drp") return {Mechanism::drp};
    if (arg == "md-drf") return {Mechanism::md_drf};
    if (arg == "pd-drf") return {Mechanism::pd_drf};
    if (arg == "uniform") return {Mechanism::uniform};
    throw CLI::ValidationError("--mechanism", "unknown mechanism '" + arg + "'");
}

struct TraceBuffers {
    std::ostringstream slice_rows;
    std::ostringstream node_rows;
    drp::TraceSink sink;

    TraceBuffers() {
        sink.slice_row = [this](int iter, int slice, int area, double x, double cost, double w) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g,%.9g\n", iter, slice, area, x, cost,
                          w);
            slice_rows << buf;
        };
        sink.node_row = [this](int iter, int node, int resource, double mu, double eta) {
            char buf[120];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g\n", iter, node, resource, mu, eta);
            node_rows << buf;
        };
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw structural_error("cannot write trace file: " + path);
        out << "iteration,slice,area,x,min_path_cost,w\n" << slice_rows.str();
        out << "\niteration,node,resource,mu,eta\n" << node_rows.str();
    }
};

void print_summary(const std::vector<harness::MetricsRecord>& records,
                   const std::vector<harness::Mechanism>& mechanisms) {
    for (harness::Mechanism m : mechanisms) {
        double welfare = 0, opex = 0, ratio = 0, iters = 0;
        int runs = 0, slices = 0;
        for (const auto& rec : records) {
            if (rec.mechanism != m) continue;
            ++runs;
            welfare += rec.welfare;
            opex += rec.opex_per_unit;
            iters += rec.iterations;
            for (const auto& [slice, r] : rec.improvement) {
                ratio += r;
                ++slices;
            }
        }
        if (runs == 0) continue;
        std::printf("%-8s runs=%d  welfare=%.6g  opex/unit=%.6g  mean_ratio=%.4f",
                    harness::mechanism_name(m), runs, welfare / runs, opex / runs,
                    slices ? ratio / slices : 0.0);
        if (m == harness::Mechanism::drp) std::printf("  mean_iters=%.1f", iters / runs);
        std::printf("\n");
    }
    if (mechanisms.size() > 1) {
        for (harness::Mechanism m : mechanisms) {
            if (m == harness::Mechanism::drp) continue;
            auto cmp = harness::delay_comparison(records, harness::Mechanism::drp, m);
            if (cmp.compared > 0)
                std::printf("delay ratio drp vs %-8s %.3f (pairs=%d, excluded=%d)\n",
                            harness::mechanism_name(m), cmp.mean_ratio, cmp.compared, cmp.excluded);
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-domain network-slice resource provisioning simulator"};

    std::string scenario_path, mechanism_arg = "all", trace_path, out_path, write_scenario_path;
    bool generate = false;
    std::uint64_t seed = 1;
    int slices = 50;
    std::string load_arg = "high", budget_arg = "off";
    double epsilon = 1e-3, step = 0.1;
    int max_iters = 5000, replications = 1;

    app.add_option("--scenario", scenario_path, "scenario file to run");
    app.add_flag("--generate", generate, "generate a scenario instead of reading one");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--slices", slices, "number of slices to generate");
    app.add_option("--load", load_arg, "loading level: low, mid, high")
        ->check(CLI::IsMember({"low", "mid", "high"}));
    app.add_option("--mechanism", mechanism_arg, "drp, md-drf, pd-drf, uniform, or all");
    auto* eps_opt = app.add_option("--epsilon", epsilon, "auction convergence threshold");
    auto* step_opt = app.add_option("--step", step, "auction relaxation step");
    app.add_option("--max-iters", max_iters, "auction iteration cap");
    app.add_option("--replications", replications, "independent replications");
    app.add_option("--budget-enforcement", budget_arg, "on or off")
        ->check(CLI::IsMember({"on", "off"}));
    app.add_option("--emit-trace", trace_path, "per-iteration auction trace CSV");
    app.add_option("--out", out_path, "metrics CSV destination");
    app.add_option("--write-scenario", write_scenario_path, "write the scenario document and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        auto mechanisms = parse_mechanisms(mechanism_arg);
        drp::DrpConfig cfg;
        cfg.epsilon = epsilon;
        cfg.step = step;
        cfg.max_iters = max_iters;
        cfg.budget_enforcement = budget_arg == "on";

        if (scenario_path.empty() == !generate) {
            std::cerr << "exactly one of --scenario or --generate is required\n";
            return 1;
        }
        if (replications < 1) {
            std::cerr << "--replications must be at least 1\n";
            return 1;
        }

        harness::ExperimentResult result;
        TraceBuffers trace;
        const bool want_trace = !trace_path.empty();

        if (!scenario_path.empty()) {
            ScenarioDocument doc = load_scenario_file(scenario_path);
            if (replications != 1) {
                std::cerr << "--replications applies to generated scenarios only\n";
                return 1;
            }
            if (eps_opt->count() == 0) cfg.epsilon = doc.epsilon;
            if (step_opt->count() == 0) cfg.step = doc.step;
            cfg.zeta = doc.zeta;
            if (!write_scenario_path.empty()) {
                save_scenario_file(doc, write_scenario_path);
                return 0;
            }
            result = harness::run_scenario(doc.scenario, mechanisms, cfg, 0,
                                           harness::LoadLevel::custom,
                                           want_trace ? &trace.sink : nullptr);
        } else {
            harness::ScenarioConfig base;
            base.seed = seed;
            base.num_slices = slices;
            base.load = load_arg == "low"   ? harness::LoadLevel::low
                        : load_arg == "mid" ? harness::LoadLevel::mid
                                            : harness::LoadLevel::high;
            if (!write_scenario_path.empty()) {
                ScenarioDocument doc;
                doc.scenario = harness::generate_scenario(base);
                doc.epsilon = cfg.epsilon;
                doc.step = cfg.step;
                doc.zeta = cfg.zeta;
                doc.load = harness::load_name(base.load);
                save_scenario_file(doc, write_scenario_path);
                return 0;
            }
            if (want_trace) {
                // trace the first replication, then run the rest normally
                harness::ScenarioConfig cfg0 = base;
                cfg0.seed = derive_seed(base.seed, 0);
                cfg0.load = base.load;
                Scenario first = harness::generate_scenario(cfg0);
                result = harness::run_scenario(first, mechanisms, cfg, cfg0.seed, base.load,
                                               &trace.sink);
                for (int rep = 1; rep < replications; ++rep) {
                    harness::ScenarioConfig c = base;
                    c.seed = derive_seed(base.seed, static_cast<std::uint64_t>(rep));
                    Scenario s = harness::generate_scenario(c);
                    auto part = harness::run_scenario(s, mechanisms, cfg, c.seed, base.load);
                    result.all_converged = result.all_converged && part.all_converged;
                    for (auto& rec : part.records) result.records.push_back(std::move(rec));
                }
            } else {
                harness::ExperimentPlan plan;
                plan.mechanisms = mechanisms;
                plan.loads = {base.load};
                plan.replications = replications;
                plan.base = base;
                plan.drp = cfg;
                result = harness::run_experiment(plan);
            }
        }

        if (want_trace) trace.write(trace_path);
        if (!out_path.empty()) harness::emit_csv(result.records, out_path);
        print_summary(result.records, mechanisms);
        if (!result.all_converged) {
            std::cerr << "warning: at least one replication did not converge\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
