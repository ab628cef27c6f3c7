#ifndef SLICENET_HARNESS_HPP
#define SLICENET_HARNESS_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "slicenet/drp.hpp"
#include "slicenet/model.hpp"

namespace slicenet::harness {

enum class LoadLevel { low, mid, high, custom };

const char* load_name(LoadLevel load);

struct ScenarioConfig {
    std::uint64_t seed = 1;
    int num_slices = 50;
    LoadLevel load = LoadLevel::high;
    double custom_phi = 1.0; // used when load == custom
    double alpha_min = 1.0;
    double alpha_max = 2.0;
};

// Reference multi-domain topology: five areas with two access points each
// (two hardware types), two regional data centers, one core data center.
// Areas 2-4 reach both regional centers; areas 1 and 5 reach one. Demands,
// operating costs and utility shapes are drawn from the configured seed.
// High load scales the common traffic demand until every routing path is
// bottlenecked; mid and low are that value over 2 and 4.
Scenario generate_scenario(const ScenarioConfig& config);

// The scale search behind the high-load setting (1% tolerance).
double calibrate_high_load(const ScenarioConfig& config);

enum class Mechanism { drp, md_drf, pd_drf, uniform };

const char* mechanism_name(Mechanism m);

struct MetricsRecord {
    Mechanism mechanism = Mechanism::drp;
    std::uint64_t seed = 0; // replication substream seed
    LoadLevel load = LoadLevel::custom;
    AreaTraffic x;                       // (slice, area) -> Gb/s
    std::map<int, double> improvement;   // slice -> volume over the uniform comparator
    double welfare = 0.0;
    int iterations = 0;
    double kkt_residual = std::numeric_limits<double>::quiet_NaN();
    double opex_per_unit = 0.0;
    std::vector<std::tuple<std::string, std::string, double>> utilization; // (domain, resource, mean)
    bool converged = true;
    double packet_bits = 12000.0; // delay-model constants the scenario used
    double hops = 3.0;
};

struct ExperimentPlan {
    std::vector<Mechanism> mechanisms;
    std::vector<LoadLevel> loads;
    int replications = 1;
    ScenarioConfig base;
    drp::DrpConfig drp;
};

struct ExperimentResult {
    std::vector<MetricsRecord> records;
    bool all_converged = true;
};

// One auction run per replication; its payments weigh the fairness baselines
// and the uniform comparator on the same scenario.
ExperimentResult run_experiment(const ExperimentPlan& plan);

// Records for one pre-built scenario (file input path).
ExperimentResult run_scenario(const Scenario& scenario, const std::vector<Mechanism>& mechanisms,
                              const drp::DrpConfig& config, std::uint64_t seed, LoadLevel load,
                              const drp::TraceSink* trace = nullptr);

// Same, reusing an already-computed auction fixed point.
ExperimentResult run_scenario(const Scenario& scenario, const std::vector<Mechanism>& mechanisms,
                              const drp::DrpResult& auction, std::uint64_t seed, LoadLevel load);

struct DelayComparison {
    Mechanism a = Mechanism::drp;
    Mechanism b = Mechanism::uniform;
    double mean_ratio = 0.0; // delay under b over delay under a
    int compared = 0;
    int excluded = 0;
};

// Pairs records replication by replication; the common admitted load is 95%
// of the smaller provisioned capacity.
DelayComparison delay_comparison(const std::vector<MetricsRecord>& records, Mechanism a,
                                 Mechanism b);

std::string render_csv(const std::vector<MetricsRecord>& records);
void emit_csv(const std::vector<MetricsRecord>& records, const std::string& path);

// Empirical P(improvement > r) on the grid {1.0, 1.1, ..., 3.0}.
std::vector<std::pair<double, double>> improvement_ccdf(const std::vector<MetricsRecord>& records,
                                                        Mechanism mechanism);

} // namespace slicenet::harness

#endif
