#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracle/dense_oracle.hpp"
#include "qnetsim/core/errors.hpp"
#include "qnetsim/host/host.hpp"
#include "qnetsim/scenarios/scenarios.hpp"

using namespace qnetsim;

namespace {

std::set<std::pair<std::string, std::string>> edges_of(const TopologyConfig& config, GraphKind kind) {
    Network net;
    populate(net, config);
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [a, nbrs] : net.graph(kind))
        for (const auto& [b, w] : nbrs) out.insert({a, b});
    net.stop();
    return out;
}

using Edges = std::set<std::pair<std::string, std::string>>;

Edges both_ways(const std::vector<std::pair<std::string, std::string>>& pairs) {
    Edges e;
    for (const auto& [a, b] : pairs) {
        e.insert({a, b});
        e.insert({b, a});
    }
    return e;
}

std::string dot_with(const Edges& edges, const std::vector<std::string>& nodes, const std::string& name) {
    DiGraph g;
    for (const auto& n : nodes) g[n];
    for (const auto& [a, b] : edges) g[a][b] = 1;
    return to_dot(g, name);
}

double metric(const ScenarioResult& r, const std::string& key) { return r.metrics.at(key); }

}  // namespace

TEST(Topologies, DataQubitsChain) {
    const Edges expected = both_ways({{"Alice", "Bob"}, {"Bob", "Eve"}, {"Eve", "Dean"}});
    EXPECT_EQ(edges_of(data_qubits_topology(), GraphKind::classical), expected);
    EXPECT_EQ(edges_of(data_qubits_topology(), GraphKind::quantum), expected);
}

TEST(Topologies, AnonymousEntanglementExportMatchesEdgeSets) {
    Edges quantum, classical;
    for (const char* p : {"B", "C", "D", "E"}) quantum.insert({"A", p});
    classical = quantum;
    for (const auto& e : both_ways({{"B", "C"}, {"B", "D"}, {"B", "E"}, {"C", "D"}, {"C", "E"}, {"D", "E"}}))
        classical.insert(e);
    Network net;
    populate(net, anonymous_entanglement_topology());
    const std::vector<std::string> nodes{"A", "B", "C", "D", "E"};
    EXPECT_EQ(net.export_graph(GraphKind::quantum), dot_with(quantum, nodes, "quantum"));
    EXPECT_EQ(net.export_graph(GraphKind::classical), dot_with(classical, nodes, "classical"));
    net.stop();
}

TEST(Topologies, RoutingDiamondAndEavesdropLine) {
    const Edges diamond = both_ways({{"A", "node_1"}, {"A", "node_2"}, {"node_1", "B"}, {"node_2", "B"}});
    EXPECT_EQ(edges_of(entanglement_routing_topology(), GraphKind::quantum), diamond);
    EXPECT_EQ(edges_of(entanglement_routing_topology(), GraphKind::classical), diamond);
    const auto s = entanglement_routing_topology().settings;
    EXPECT_FALSE(s.use_hop_by_hop);
    EXPECT_TRUE(s.use_ent_swap);
    const Edges line = both_ways({{"Alice", "Eve"}, {"Eve", "Bob"}});
    EXPECT_EQ(edges_of(eavesdropping_topology(), GraphKind::quantum), line);
    EXPECT_EQ(edges_of(eavesdropping_topology(), GraphKind::classical), line);
}

TEST(DataQubits, FiveSentAckedReceived) {
    for (std::uint64_t seed : {0u, 7u, 123u}) {
        const auto r = scenario_data_qubits(seed);
        EXPECT_TRUE(r.success);
        EXPECT_EQ(metric(r, "qubits_sent"), 5);
        EXPECT_EQ(metric(r, "qubits_received"), 5);
        EXPECT_EQ(metric(r, "acks"), 5);
        EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
        EXPECT_FALSE(r.transcript.empty());
    }
}

TEST(DataQubits, OnesFrequencyNearHalf) {
    double ones = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) ones += metric(scenario_data_qubits(seed), "ones");
    // 500 fair coins: sd ~0.022, the band is over 3 sd wide on each side.
    EXPECT_NEAR(ones / 500.0, 0.5, 0.07);
}

TEST(DataQubits, WithoutEveQuantumLinkNothingArrives) {
    auto topo = data_qubits_topology();
    topo.links[2].kind = LinkKind::classical;
    ScenarioOptions o;
    o.topology = topo;
    const auto r = scenario_data_qubits(3, o);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(metric(r, "qubits_received"), 0);
    EXPECT_EQ(metric(r, "acks"), 0);
    EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
}

TEST(DataQubits, TopologyMissingHostRejected) {
    ScenarioOptions o;
    o.topology = eavesdropping_topology();
    EXPECT_THROW(scenario_data_qubits(1, o), ConfigError);
}

TEST(AnonymousEntanglement, TeleportsZeroOverHiddenPair) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = scenario_anonymous_entanglement(seed);
        EXPECT_TRUE(r.success) << seed;
        EXPECT_EQ(metric(r, "teleported_bit"), 0);
        EXPECT_EQ(metric(r, "broadcasts_seen"), 3);
        EXPECT_EQ(metric(r, "ghz_shares"), 4);
        EXPECT_GE(metric(r, "pair_fidelity"), 1 - 1e-9);
        EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
    }
}

// Exhaustive over (mB, mC, bD, bE): after B and C measure in the X basis and
// D applies Z^bD, E's Z^c leaves D,E in Phi+ exactly when c = mB ^ mC ^ bD.
// E's own broadcast bit plays no part.
TEST(AnonymousEntanglement, ParityIdentityOracle) {
    using qnetsim::qsim::GateKind;
    for (int pattern = 0; pattern < 16; ++pattern) {
        const int mb = pattern & 1, mc = (pattern >> 1) & 1, bd = (pattern >> 2) & 1, be = (pattern >> 3) & 1;
        for (int c = 0; c < 2; ++c) {
            oracle::State s(4);  // B=0, C=1, D=2, E=3
            s.apply1(oracle::single(GateKind::H), 0);
            for (int t = 1; t < 4; ++t) s.apply2(oracle::two(GateKind::CNOT), 0, t);
            s.apply1(oracle::single(GateKind::H), 0);
            s.apply1(oracle::single(GateKind::H), 1);
            s.project(0, mb);
            s.project(1, mc);
            if (bd) s.apply1(oracle::single(GateKind::Z), 2);
            if (c) s.apply1(oracle::single(GateKind::Z), 3);
            const int base = mb | (mc << 1);
            const auto a00 = s.vec()(base), a11 = s.vec()(base | 4 | 8);
            const double f = std::norm((a00 + a11) / std::sqrt(2.0));
            const bool expect_phi_plus = c == (mb ^ mc ^ bd);
            EXPECT_NEAR(f, expect_phi_plus ? 1.0 : 0.0, 1e-12) << pattern << " c=" << c;
            if (be && c == (be ^ mb ^ mc ^ bd)) EXPECT_NEAR(f, 0.0, 1e-12);
        }
    }
}

TEST(EntanglementRouting, WeightsFollowStoredPairs) {
    Network net(4);
    populate(net, entanglement_routing_topology());
    Host& a = *net.host("A");
    Host& n1 = *net.host("node_1");
    for (int i = 0; i < 3; ++i) {
        auto [x, y] = qsim::make_epr(net.backend(), "A", "node_1");
        a.add_epr("node_1", std::move(x));
        n1.add_epr("A", std::move(y));
    }
    const DiGraph w = entanglement_weights(net, net.graph(GraphKind::quantum));
    EXPECT_DOUBLE_EQ(w.at("A").at("node_1"), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(w.at("node_1").at("A"), 1.0 / 3.0);
    EXPECT_EQ(w.at("A").at("node_2"), 1'000'000.0);
    EXPECT_EQ(w.at("node_1").at("B"), 1'000'000.0);
    net.stop();
}

TEST(EntanglementRouting, AuditCatchesHeavierChoice) {
    RouteRecord r;
    r.source = "A";
    r.target = "B";
    r.snapshot["A"]["node_1"] = 1.0;
    r.snapshot["node_1"]["B"] = 1.0;
    r.snapshot["A"]["node_2"] = 0.5;
    r.snapshot["node_2"]["B"] = 0.5;
    r.snapshot["B"];
    r.chosen = {"A", "node_1", "B"};
    EXPECT_EQ(audit_routes({r}), 1u);
    r.chosen = {"A", "node_2", "B"};
    EXPECT_EQ(audit_routes({r}), 0u);
}

TEST(EntanglementRouting, MessagesDecodeAndRoutesAreArgmin) {
    RoutingOptions o;
    o.n_messages = 30;
    const auto run = run_entanglement_routing(11, o);
    const auto& r = run.result;
    EXPECT_TRUE(r.success);
    EXPECT_EQ(metric(r, "messages_correct"), 30);
    EXPECT_EQ(metric(r, "messages_failed"), 0);
    EXPECT_EQ(metric(r, "route_counts_node_1") + metric(r, "route_counts_node_2"), 30);
    EXPECT_EQ(metric(r, "route_audit_violations"), 0);
    EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
    EXPECT_FALSE(run.records.empty());
    for (const auto& rec : run.records) {
        for (const auto& [u, nbrs] : rec.snapshot)
            for (const auto& [v, wt] : nbrs) EXPECT_TRUE(wt == 1'000'000.0 || (wt > 0 && wt <= 1.0));
    }
}

TEST(EntanglementRouting, WithoutGenerationBothPathsWeighTwoMillion) {
    RoutingOptions o;
    o.n_messages = 5;
    o.generate = false;
    const auto run = run_entanglement_routing(2, o);
    EXPECT_TRUE(run.result.success);
    EXPECT_EQ(metric(run.result, "messages_correct"), 5);
    ASSERT_FALSE(run.records.empty());
    const auto& first = run.records.front();
    EXPECT_EQ(first.source, "A");
    EXPECT_EQ(path_weight(first.snapshot, {"A", "node_1", "B"}), 2'000'000.0);
    EXPECT_EQ(path_weight(first.snapshot, {"A", "node_2", "B"}), 2'000'000.0);
    EXPECT_EQ(first.chosen, (Path{"A", "node_1", "B"}));
}

TEST(Eavesdropping, CleanChannelHasZeroQber) {
    const auto r = scenario_eavesdropping(5, 128, false);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(metric(r, "qber"), 0.0);
    EXPECT_EQ(metric(r, "prefix_detected"), 0);
    EXPECT_GT(metric(r, "sifted_len"), 0);
    EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
}

TEST(Eavesdropping, SnifferShowsUp) {
    const auto r = scenario_eavesdropping(5, 256, true);
    EXPECT_EQ(metric(r, "prefix_detected"), 1);
    EXPECT_GT(metric(r, "qber"), 0.0);
    EXPECT_EQ(metric(r, "sample_len"), std::floor(metric(r, "sifted_len") / 2));
    EXPECT_EQ(metric(r, "live_qubits_after_teardown"), 0);
}

// A Z-basis measuring relay flips half of the X-basis rounds and none of the
// Z-basis ones, so sifted bits disagree with probability 1/4.
TEST(Eavesdropping, PooledQberMatchesMeasureAttack) {
    double errors = 0, sample = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = scenario_eavesdropping(seed, 128, true);
        errors += metric(r, "sample_errors");
        sample += metric(r, "sample_len");
    }
    // ~640 bits: sd ~0.017.
    EXPECT_NEAR(errors / sample, 0.25, 0.06);
}

TEST(Eavesdropping, RejectsShortRuns) { EXPECT_THROW(scenario_eavesdropping(1, 32), std::invalid_argument); }

TEST(Qkd, KeysAgreeWithoutEavesdropper) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Network net(seed);
        TopologyConfig c;
        c.hosts = {"A", "B"};
        c.links = {{"A", "B"}};
        populate(net, c);
        const auto k = qkd_keygen(net, "A", "B", 32);
        EXPECT_EQ(k.key_a.size(), 32u);
        EXPECT_EQ(k.key_a, k.key_b);
        EXPECT_EQ(k.qber, 0.0);
        net.stop();
    }
}

TEST(Qkd, SiftedLengthNearHalf) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = scenario_qkd(seed, 32);
        EXPECT_TRUE(r.success);
        EXPECT_GE(metric(r, "sifted_len"), 44);
        EXPECT_LE(metric(r, "sifted_len"), 84);
        EXPECT_EQ(metric(r, "keys_match"), 1);
    }
}

TEST(Qkd, MeasuringRelayAborts) {
    int aborted = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Network net(seed);
        populate(net, eavesdropping_topology());
        Host& eve = *net.host("Eve");
        eve.q_relay_sniffing = true;
        eve.set_q_sniff_fn([](const std::string&, const std::string&, qsim::Qubit& q) { q.measure(true); });
        try {
            qkd_keygen(net, "Alice", "Bob", 32);
        } catch (const InsufficientKey&) {
            ++aborted;
        }
        net.stop();
    }
    // P(sample QBER <= 0.11 | p = 0.25, ~32 bits) is about 3%.
    EXPECT_GE(aborted, 8);
}

TEST(Scenarios, ReplayDeterministic) {
    for (const auto& name : scenario_names()) {
        const auto a = to_json(run_scenario(name, 9));
        const auto b = to_json(run_scenario(name, 9));
        EXPECT_EQ(a["metrics"].dump(), b["metrics"].dump()) << name;
        EXPECT_EQ(a.dump(), b.dump()) << name;
    }
}

TEST(Scenarios, JsonKeyOrderAndIntegers) {
    const auto j = to_json(scenario_data_qubits(1));
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"name", "seed", "metrics", "success", "transcript"}));
    EXPECT_TRUE(j["metrics"]["qubits_sent"].is_number_integer());
}

TEST(Scenarios, UnknownNameThrows) { EXPECT_THROW(run_scenario("nope", 1), std::out_of_range); }
