#include <array>
#include <memory>

#include "qnetsim/core/errors.hpp"
#include "session.hpp"

namespace qnetsim {

DiGraph entanglement_weights(const Network& network, const DiGraph& quantum_graph) {
    DiGraph weights;
    for (const auto& [node, edges] : quantum_graph) {
        auto& out = weights[node];
        const auto host = network.host(node);
        for (const auto& [peer, unused] : edges) {
            const std::size_t pairs = host->epr_count(peer);
            out[peer] = pairs == 0 ? kNoPairWeight : 1.0 / static_cast<double>(pairs);
        }
    }
    return weights;
}

std::size_t audit_routes(const std::vector<RouteRecord>& records) {
    std::size_t violations = 0;
    for (const auto& r : records) {
        if (!is_path(r.snapshot, r.chosen)) {
            ++violations;
            continue;
        }
        const double chosen = path_weight(r.snapshot, r.chosen);
        for (const auto& alt : all_simple_paths(r.snapshot, r.source, r.target)) {
            if (path_weight(r.snapshot, alt) < chosen - 1e-12) {
                ++violations;
                break;
            }
        }
    }
    return violations;
}

RoutingRun run_entanglement_routing(std::uint64_t seed, const RoutingOptions& options) {
    if (options.n_messages < 1) throw std::invalid_argument("n_messages must be at least 1");
    detail::Session s("entanglement_routing", seed, options, entanglement_routing_topology(),
                      {"A", "node_1", "node_2", "B"});
    Network& net = s.net();
    RoutingRun run;

    net.set_routing_algo(GraphKind::quantum, [&](const DiGraph& graph, const std::string& source,
                                                 const std::string& target) {
        RouteRecord record{net.now(), source, target, {}, entanglement_weights(net, graph), {}};
        for (const auto& [node, edges] : graph)
            for (const auto& [peer, unused] : edges) record.pairs[node][peer] = net.host(node)->epr_count(peer);
        record.chosen = weighted_shortest_path(record.snapshot, source, target);
        run.records.push_back(record);
        return record.chosen;
    });

    std::map<std::string, int> route_counts{{"node_1", 0}, {"node_2", 0}};
    net.set_send_tap([&](const NetworkPacket& p) {
        if (p.inner.protocol != ProtocolTag::SEND_SUPERDENSE || p.route_hint.size() < 3) return;
        for (std::size_t i = 1; i + 1 < p.route_hint.size(); ++i)
            if (route_counts.count(p.route_hint[i])) ++route_counts[p.route_hint[i]];
    });

    auto generating = std::make_shared<bool>(options.generate);
    auto generate = [generating, poll = options.generation_poll](Host& host) {
        while (*generating) {
            if (host.is_idle())
                for (const auto& peer : host.quantum_peers()) host.send_epr(peer);
            host.sleep(poll);
        }
    };
    std::vector<TaskHandle> generators;
    if (options.generate) {
        generators.push_back(s["node_1"].run_protocol(generate));
        generators.push_back(s["node_2"].run_protocol(generate));
    }

    static constexpr std::array<const char*, 4> kChoices{"00", "11", "10", "01"};
    std::vector<std::string> sent;
    int failed = 0;
    auto sender = s["A"].run_protocol([&](Host& host) {
        for (int i = 0; i < options.n_messages; ++i) {
            const int pick = 2 * host.random_bit() + host.random_bit();
            const std::string m = kChoices[static_cast<std::size_t>(pick)];
            const AckResult r = host.send_superdense("B", m, true);
            sent.push_back(m);
            if (r != AckResult::acked) {
                ++failed;
                s.note(host.host_id(), "superdense", m + " " + std::string(to_string(r)));
            }
        }
    });
    sender.wait();
    *generating = false;
    for (auto& g : generators) g.wait();
    detail::rethrow_errors({sender});
    detail::rethrow_errors(generators);

    int correct = 0;
    Host& b = s["B"];
    for (const auto& m : sent) {
        auto got = b.get_next_classical("A");
        if (!got) break;
        if (got->content == m) ++correct;
    }

    s.metric("messages_sent") = static_cast<double>(sent.size());
    s.metric("messages_correct") = correct;
    s.metric("messages_failed") = failed;
    s.metric("route_counts_node_1") = route_counts["node_1"];
    s.metric("route_counts_node_2") = route_counts["node_2"];
    s.metric("route_decisions") = static_cast<double>(run.records.size());
    s.metric("route_audit_violations") = static_cast<double>(audit_routes(run.records));
    run.result = s.finish();
    const auto& m = run.result.metrics;
    run.result.success = m.at("messages_correct") == options.n_messages && m.at("route_audit_violations") == 0 &&
                         m.at("live_qubits_after_teardown") == 0;
    return run;
}

ScenarioResult scenario_entanglement_routing(std::uint64_t seed, int n_messages, const ScenarioOptions& options) {
    RoutingOptions o;
    static_cast<ScenarioOptions&>(o) = options;
    o.n_messages = n_messages;
    return run_entanglement_routing(seed, o).result;
}

}  // namespace qnetsim
