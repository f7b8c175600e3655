#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnetsim/cli/topology.hpp"
#include "qnetsim/core/log.hpp"
#include "qnetsim/network/graph.hpp"
#include "qnetsim/network/network.hpp"

namespace qnetsim {

struct ScenarioResult {
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, double> metrics;
    std::vector<std::string> transcript;
    bool success = false;
};

/// {name, seed, metrics, success, transcript} in that order. Integral metric
/// values are written as integers.
nlohmann::ordered_json to_json(const ScenarioResult& result);

struct ScenarioOptions {
    /// Replaces the built-in topology. Must declare the hosts the scenario uses.
    std::optional<TopologyConfig> topology;
    LogLevel transcript_level = LogLevel::info;
    /// Called with the populated network before any protocol starts.
    std::function<void(Network&)> on_network;
};

// Built-in topologies.
TopologyConfig data_qubits_topology();
TopologyConfig anonymous_entanglement_topology();
TopologyConfig entanglement_routing_topology();
TopologyConfig eavesdropping_topology();
TopologyConfig qkd_topology();
/// Built-in topology of a scenario by name; throws std::out_of_range.
TopologyConfig scenario_topology(const std::string& name);

/// Alice sends 5 H-prepared qubits to Dean over Alice-Bob-Eve-Dean.
/// Metrics: qubits_sent, qubits_received, acks, ones, live_qubits_after_teardown.
ScenarioResult scenario_data_qubits(std::uint64_t seed, const ScenarioOptions& options = {});

/// GHZ-based anonymous entanglement between D and E, then D teleports |0> to E.
/// Metrics: teleported_bit, broadcasts_seen, pair_fidelity (diagnostics
/// builds), live_qubits_after_teardown.
ScenarioResult scenario_anonymous_entanglement(std::uint64_t seed, const ScenarioOptions& options = {});

/// One call of the entanglement-weight routing function.
struct RouteRecord {
    double time = 0;
    std::string source;
    std::string target;
    /// Stored pair counts per directed quantum edge at decision time.
    std::map<std::string, std::map<std::string, std::size_t>> pairs;
    /// Weighted graph the decision was made on.
    DiGraph snapshot;
    Path chosen;
};

struct RoutingOptions : ScenarioOptions {
    int n_messages = 100;
    /// Middle nodes create pairs while idle.
    bool generate = true;
    /// Virtual seconds between generation rounds. Each round puts one packet
    /// per peer on the sequential network queue, so this must stay well
    /// above peers * delay or the queue backs up.
    double generation_poll = 1.0;
};

struct RoutingRun {
    ScenarioResult result;
    std::vector<RouteRecord> records;
};

inline constexpr double kNoPairWeight = 1'000'000.0;

/// Edge u->v weighs 1/(pairs u holds with v), or kNoPairWeight without pairs.
DiGraph entanglement_weights(const Network& network, const DiGraph& quantum_graph);

/// Superdense messages A->B over the diamond with entanglement-weight routing.
/// Metrics: messages_sent, messages_correct, messages_failed,
/// route_counts_node_1, route_counts_node_2, route_audit_violations,
/// live_qubits_after_teardown.
RoutingRun run_entanglement_routing(std::uint64_t seed, const RoutingOptions& options = {});
ScenarioResult scenario_entanglement_routing(std::uint64_t seed, int n_messages,
                                             const ScenarioOptions& options = {});

/// Route records whose chosen path is heavier than some alternative.
std::size_t audit_routes(const std::vector<RouteRecord>& records);

inline constexpr const char* kSniffPrefix = "I'm listening :)";

/// Sniffing Eve on A-Eve-B: prefix check on a classical message, then BB84.
/// Metrics: qber, sifted_len, sample_len, prefix_detected,
/// live_qubits_after_teardown.
ScenarioResult scenario_eavesdropping(std::uint64_t seed, int n_bits, bool sniffing = true,
                                      const ScenarioOptions& options = {});

struct Bb84Outcome {
    std::size_t raw = 0;
    std::size_t sifted = 0;
    std::size_t sample = 0;
    std::size_t errors = 0;
    double qber = 0;
    /// Sifted bits not revealed, in order.
    std::string kept_a;
    std::string kept_b;
};

/// Runs BB84 between hosts a and b of a started network. `sample_size` maps
/// the sifted length to the number of trailing sifted bits revealed.
/// Classical frames are read by their expected length, so a relay that only
/// prepends text does not break the exchange. Must be called from outside
/// the simulation (driver thread).
Bb84Outcome run_bb84(Network& network, const std::string& a, const std::string& b, std::size_t n_raw,
                     const std::function<std::size_t(std::size_t)>& sample_size);

struct KeyResult {
    std::string key_a;
    std::string key_b;
    double qber = 0;
    std::size_t sifted = 0;
};

inline constexpr double kQberAbort = 0.11;

/// BB84 with 4*key_len raw qubits; everything past the first key_len sifted
/// bits is revealed. Throws InsufficientKey when fewer than
/// key_len + ceil(key_len/2) bits survive sifting or when the QBER exceeds
/// kQberAbort.
KeyResult qkd_keygen(Network& network, const std::string& a, const std::string& b, std::size_t key_len);

/// qkd_keygen on A-B. Metrics: key_len, keys_match, qber, sifted_len,
/// aborted, live_qubits_after_teardown.
ScenarioResult scenario_qkd(std::uint64_t seed, int key_len = 32, const ScenarioOptions& options = {});

/// Scenario names accepted by run_scenario, sorted.
std::vector<std::string> scenario_names();
/// Runs a scenario with its default parameters. Throws std::out_of_range for
/// unknown names.
ScenarioResult run_scenario(const std::string& name, std::uint64_t seed, const ScenarioOptions& options = {});

}  // namespace qnetsim
