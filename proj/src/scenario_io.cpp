#include "slicenet/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace slicenet {

namespace {

using json = nlohmann::ordered_json;

NetworkDomain domain_from(const std::string& name) {
    if (name == "ran") return NetworkDomain::ran;
    if (name == "cran") return NetworkDomain::cran;
    if (name == "cn") return NetworkDomain::core;
    throw structural_error("unknown domain '" + name + "'");
}

std::vector<double> doubles_from(const json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

} // namespace

namespace {

ScenarioDocument parse_scenario_impl(const json& doc);

} // namespace

ScenarioDocument parse_scenario(const std::string& text) {
    try {
        return parse_scenario_impl(json::parse(text));
    } catch (const structural_error&) {
        throw;
    } catch (const std::exception& e) {
        throw structural_error(std::string("scenario parse error: ") + e.what());
    }
}

namespace {

ScenarioDocument parse_scenario_impl(const json& doc) {
    ScenarioDocument out;
    const auto& topo = doc.at("topology");
    out.scenario.topology.num_areas = topo.at("areas").get<int>();
    for (const auto& jn : topo.at("nodes")) {
        NodeSpec n;
        n.id = jn.at("id").get<int>();
        n.domain = domain_from(jn.at("domain").get<std::string>());
        for (const auto& r : jn.at("resources")) n.resources.push_back(r.get<std::string>());
        n.capacity = ResourceVector(doubles_from(jn.at("capacity")));
        n.opex = ResourceVector(doubles_from(jn.at("opex")));
        out.scenario.topology.nodes.push_back(std::move(n));
    }
    for (const auto& jp : topo.at("paths")) {
        PathSpec p;
        p.id = jp.at("id").get<int>();
        p.area = jp.at("area").get<int>();
        for (const auto& nid : jp.at("nodes")) p.nodes.push_back(nid.get<int>());
        out.scenario.topology.paths.push_back(std::move(p));
    }
    for (const auto& js : doc.at("slices")) {
        SliceSpec s;
        s.id = js.at("id").get<int>();
        for (const auto& ja : js.at("areas")) {
            AreaSliceParams params;
            params.utility.phi = ja.at("phi").get<double>();
            params.utility.alpha = ja.at("alpha").get<double>();
            params.budget = ja.at("budget").get<double>();
            params.delay.packet_bits = ja.at("packet_bits").get<double>();
            params.delay.hops = ja.at("hops").get<double>();
            params.delay.beta = ja.at("beta").get<double>();
            s.areas[ja.at("area").get<int>()] = params;
        }
        for (const auto& jd : js.at("demand")) {
            s.demand[{jd.at("path").get<int>(), jd.at("node").get<int>()}] =
                ResourceVector(doubles_from(jd.at("values")));
        }
        out.scenario.slices.push_back(std::move(s));
    }
    const auto& cfg = doc.at("config");
    out.epsilon = cfg.at("epsilon").get<double>();
    out.step = cfg.at("step").get<double>();
    out.zeta = cfg.at("zeta").get<double>();
    out.load = cfg.at("load").get<std::string>();

    validate(out.scenario);
    return out;
}

} // namespace

std::string serialize_scenario(const ScenarioDocument& doc) {
    json j;
    json topo;
    topo["areas"] = doc.scenario.topology.num_areas;
    topo["nodes"] = json::array();
    for (const auto& n : doc.scenario.topology.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["domain"] = domain_name(n.domain);
        jn["resources"] = n.resources;
        jn["capacity"] = n.capacity.values;
        jn["opex"] = n.opex.values;
        topo["nodes"].push_back(std::move(jn));
    }
    topo["paths"] = json::array();
    for (const auto& p : doc.scenario.topology.paths) {
        json jp;
        jp["id"] = p.id;
        jp["area"] = p.area;
        jp["nodes"] = p.nodes;
        topo["paths"].push_back(std::move(jp));
    }
    j["topology"] = std::move(topo);
    j["slices"] = json::array();
    for (const auto& s : doc.scenario.slices) {
        json js;
        js["id"] = s.id;
        js["areas"] = json::array();
        for (const auto& [area, params] : s.areas) {
            json ja;
            ja["area"] = area;
            ja["phi"] = params.utility.phi;
            ja["alpha"] = params.utility.alpha;
            ja["budget"] = params.budget;
            ja["packet_bits"] = params.delay.packet_bits;
            ja["hops"] = params.delay.hops;
            ja["beta"] = params.delay.beta;
            js["areas"].push_back(std::move(ja));
        }
        js["demand"] = json::array();
        for (const auto& [key, d] : s.demand) {
            json jd;
            jd["path"] = key.first;
            jd["node"] = key.second;
            jd["values"] = d.values;
            js["demand"].push_back(std::move(jd));
        }
        j["slices"].push_back(std::move(js));
    }
    json cfg;
    cfg["epsilon"] = doc.epsilon;
    cfg["step"] = doc.step;
    cfg["zeta"] = doc.zeta;
    cfg["load"] = doc.load;
    j["config"] = std::move(cfg);
    return j.dump(2) + "\n";
}

ScenarioDocument load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw structural_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void save_scenario_file(const ScenarioDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw structural_error("cannot write scenario file: " + path);
    out << serialize_scenario(doc);
    if (!out) throw structural_error("write failed: " + path);
}

} // namespace slicenet
