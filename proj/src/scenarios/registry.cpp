#include <cmath>
#include <stdexcept>

#include "qnetsim/scenarios/scenarios.hpp"

namespace qnetsim {

namespace {

TopologyConfig make(std::vector<std::string> hosts, std::vector<TopologyLink> links, TopologySettings settings = {}) {
    TopologyConfig c;
    c.hosts = std::move(hosts);
    c.links = std::move(links);
    c.settings = settings;
    return c;
}

}  // namespace

nlohmann::ordered_json to_json(const ScenarioResult& result) {
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [key, value] : result.metrics) {
        if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 9.0e15)
            metrics[key] = static_cast<std::int64_t>(value);
        else
            metrics[key] = value;
    }
    nlohmann::ordered_json j;
    j["name"] = result.name;
    j["seed"] = result.seed;
    j["metrics"] = std::move(metrics);
    j["success"] = result.success;
    j["transcript"] = result.transcript;
    return j;
}

TopologyConfig data_qubits_topology() {
    return make({"Alice", "Bob", "Eve", "Dean"}, {{"Alice", "Bob"}, {"Bob", "Eve"}, {"Eve", "Dean"}});
}

TopologyConfig anonymous_entanglement_topology() {
    // A reaches everyone over both kinds of link, one way only; the others
    // only talk classically among themselves.
    std::vector<TopologyLink> links;
    for (const char* peer : {"B", "C", "D", "E"}) links.push_back({"A", peer, LinkKind::both, false});
    const std::vector<std::string> rest{"B", "C", "D", "E"};
    for (std::size_t i = 0; i < rest.size(); ++i)
        for (std::size_t j = i + 1; j < rest.size(); ++j) links.push_back({rest[i], rest[j], LinkKind::classical});
    return make({"A", "B", "C", "D", "E"}, links);
}

TopologyConfig entanglement_routing_topology() {
    TopologySettings s;
    s.use_hop_by_hop = false;
    s.use_ent_swap = true;
    s.delay = 0.1;
    return make({"A", "node_1", "node_2", "B"},
                {{"A", "node_1"}, {"A", "node_2"}, {"node_1", "B"}, {"node_2", "B"}}, s);
}

TopologyConfig eavesdropping_topology() {
    return make({"Alice", "Eve", "Bob"}, {{"Alice", "Eve"}, {"Eve", "Bob"}});
}

TopologyConfig qkd_topology() { return make({"Alice", "Bob"}, {{"Alice", "Bob"}}); }

TopologyConfig scenario_topology(const std::string& name) {
    if (name == "data_qubits") return data_qubits_topology();
    if (name == "anonymous_entanglement") return anonymous_entanglement_topology();
    if (name == "entanglement_routing") return entanglement_routing_topology();
    if (name == "eavesdropping") return eavesdropping_topology();
    if (name == "qkd") return qkd_topology();
    throw std::out_of_range("unknown scenario " + name);
}

std::vector<std::string> scenario_names() {
    return {"anonymous_entanglement", "data_qubits", "eavesdropping", "entanglement_routing", "qkd"};
}

ScenarioResult run_scenario(const std::string& name, std::uint64_t seed, const ScenarioOptions& options) {
    if (name == "data_qubits") return scenario_data_qubits(seed, options);
    if (name == "anonymous_entanglement") return scenario_anonymous_entanglement(seed, options);
    if (name == "entanglement_routing") return scenario_entanglement_routing(seed, 100, options);
    if (name == "eavesdropping") return scenario_eavesdropping(seed, 256, true, options);
    if (name == "qkd") return scenario_qkd(seed, 32, options);
    throw std::out_of_range("unknown scenario " + name);
}

}  // namespace qnetsim
