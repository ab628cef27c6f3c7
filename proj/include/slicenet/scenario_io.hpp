#ifndef SLICENET_SCENARIO_IO_HPP
#define SLICENET_SCENARIO_IO_HPP

#include <string>

#include "slicenet/model.hpp"

namespace slicenet {

// On-disk scenario document: the scenario plus the run defaults it was
// written with. Serialization is canonical: parse -> serialize of a file
// produced by this writer reproduces it byte for byte.
struct ScenarioDocument {
    Scenario scenario;
    double epsilon = 1e-3;
    double step = 0.1;
    double zeta = 0.9;
    std::string load = "custom";
};

ScenarioDocument parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioDocument& doc);

ScenarioDocument load_scenario_file(const std::string& path);
void save_scenario_file(const ScenarioDocument& doc, const std::string& path);

} // namespace slicenet

#endif
