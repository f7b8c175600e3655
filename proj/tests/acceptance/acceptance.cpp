// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracle/dense_oracle.hpp"
#include "qnetsim/core/errors.hpp"
#include "qnetsim/host/host.hpp"
#include "qnetsim/qsim/diagnostics.hpp"
#include "qnetsim/scenarios/scenarios.hpp"
#include "support/fixtures.hpp"

using namespace qnetsim;
using qnetsim::qsim::Gate;
using qnetsim::qsim::GateKind;
using qnetsim::qsim::Qubit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Joint amplitudes of `qs` (bit i = qs[i]) from backend snapshots.
oracle::Vec joint(const std::vector<const Qubit*>& qs) {
    std::vector<qsim::StateSnapshot> snaps;
    std::vector<qsim::QubitKey> keys;
    std::set<qsim::QubitKey> covered;
    for (const auto* q : qs) {
        keys.push_back(q->key());
        if (covered.count(q->key())) continue;
        snaps.push_back(q->inspect());
        covered.insert(snaps.back().qubit_order.begin(), snaps.back().qubit_order.end());
    }
    return oracle::joint_state(snaps, keys);
}

double phi_plus(const Qubit& a, const Qubit& b) {
    const oracle::Vec v = joint({&a, &b});
    return std::norm((v(0) + v(3)) / std::sqrt(2.0));
}

// 1. Random circuits against the dense matrix oracle.
Outcome backend_oracle() {
    std::mt19937_64 rng(1);
    const std::vector<GateKind> one{GateKind::I,  GateKind::X,  GateKind::Y,  GateKind::Z,  GateKind::H,
                                    GateKind::S,  GateKind::T,  GateKind::RX, GateKind::RY, GateKind::RZ,
                                    GateKind::Custom1Q};
    const std::vector<GateKind> two{GateKind::CNOT, GateKind::CZ, GateKind::Custom2Q};
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    double worst = 0;
    std::set<GateKind> used;
    for (int c = 0; c < 500; ++c) {
        auto be = std::make_shared<qsim::Backend>(c);
        const int n = 1 + static_cast<int>(rng() % 4);
        std::vector<Qubit> qs;
        for (int i = 0; i < n; ++i) qs.push_back(Qubit::create(be, "A"));
        oracle::State ref(n);
        const int steps = 5 + static_cast<int>(rng() % 20);
        for (int s = 0; s < steps; ++s) {
            if (n > 1 && rng() % 3 == 0) {
                const GateKind k = two[rng() % two.size()];
                const int a = static_cast<int>(rng() % n);
                const int b = (a + 1 + static_cast<int>(rng() % (n - 1))) % n;
                oracle::Mat u = k == GateKind::Custom2Q ? oracle::random_unitary(4, rng) : oracle::two(k);
                const Gate g = k == GateKind::CNOT ? Gate::cnot()
                               : k == GateKind::CZ ? Gate::cz()
                                                   : Gate::custom(oracle::to_matrix4(u));
                qs[a].apply(g, qs[b]);
                ref.apply2(u, a, b);
                used.insert(k);
            } else {
                const GateKind k = one[rng() % one.size()];
                const int q = static_cast<int>(rng() % n);
                const double th = angle(rng);
                oracle::Mat u = k == GateKind::Custom1Q ? oracle::random_unitary(2, rng) : oracle::single(k, th);
                Gate g = Gate::i();
                switch (k) {
                    case GateKind::I: g = Gate::i(); break;
                    case GateKind::X: g = Gate::x(); break;
                    case GateKind::Y: g = Gate::y(); break;
                    case GateKind::Z: g = Gate::z(); break;
                    case GateKind::H: g = Gate::h(); break;
                    case GateKind::S: g = Gate::s(); break;
                    case GateKind::T: g = Gate::t(); break;
                    case GateKind::RX: g = Gate::rx(th); break;
                    case GateKind::RY: g = Gate::ry(th); break;
                    case GateKind::RZ: g = Gate::rz(th); break;
                    default: g = Gate::custom(oracle::to_matrix2(u));
                }
                qs[q].apply(g);
                ref.apply1(u, q);
                used.insert(k);
            }
        }
        std::vector<const Qubit*> ptrs;
        for (const auto& q : qs) ptrs.push_back(&q);
        const oracle::Vec got = joint(ptrs);
        for (int x = 0; x < (1 << n); ++x) {
            worst = std::max(worst, std::abs(got(x).real() - ref.vec()(x).real()));
            worst = std::max(worst, std::abs(got(x).imag() - ref.vec()(x).imag()));
        }
    }
    return {worst <= 1e-9 && used.size() == one.size() + two.size(),
            "500 circuits, " + std::to_string(used.size()) + " gate kinds, max deviation " + fmt("%.2e", worst)};
}

// 2. Teleportation of random states over A-B-C.
Outcome teleportation() {
    fixtures::Net n(2);
    n.build({"A", "B", "C"}, fixtures::chain({"A", "B", "C"}));
    std::set<std::pair<int, int>> patterns;
    n->set_send_tap([&](const NetworkPacket& p) {
        if (const auto* c = std::get_if<CorrectionBits>(&p.inner.payload)) patterns.insert({c->m1, c->m2});
    });
    std::mt19937_64 rng(2);
    double worst = 1;
    int delivered = 0;
    for (int i = 0; i < 50; ++i) {
        const oracle::Mat u = oracle::random_unitary(2, rng);
        auto q = n["A"].new_qubit();
        q.apply(Gate::custom(oracle::to_matrix2(u)));
        if (n["A"].send_teleport("C", q, true) != AckResult::acked) continue;
        auto got = n["C"].get_data_qubit("A", std::nullopt, 10);
        if (!got) continue;
        ++delivered;
        worst = std::min(worst, qsim::state_fidelity(*got, u(0, 0), u(1, 0)));
    }
    return {delivered == 50 && worst >= 1 - 1e-9 && patterns.size() == 4,
            std::to_string(delivered) + "/50 delivered, min fidelity " + fmt("%.12f", worst) + ", " +
                std::to_string(patterns.size()) + "/4 correction patterns"};
}

// 3. Superdense coding, every message 100 times over the diamond.
Outcome superdense() {
    Network net(3);
    populate(net, entanglement_routing_topology());
    Host& a = *net.host("A");
    Host& b = *net.host("B");
    int ok = 0;
    for (int rep = 0; rep < 100; ++rep) {
        for (const std::string m : {"00", "01", "10", "11"}) {
            if (a.send_superdense("B", m, true) != AckResult::acked) continue;
            auto got = b.get_next_classical("A", 10);
            if (got && got->content == m) ++ok;
        }
    }
    net.stop();
    return {ok == 400, std::to_string(ok) + "/400 decoded"};
}

// 4. Swap chains of 2, 3 and 4 hops.
Outcome swap_chains() {
    std::string detail;
    bool pass = true;
    for (int hops = 2; hops <= 4; ++hops) {
        std::vector<std::string> names;
        for (int i = 0; i <= hops; ++i) names.push_back("n" + std::to_string(i));
        fixtures::Net n(40 + hops);
        n.build(names, fixtures::chain(names));
        double worst = 1;
        int zz = 0, xx = 0;
        for (int trial = 0; trial < 400; ++trial) {
            const std::string id = n->entanglement_swap_chain(names);
            auto a = n[names.front()].get_epr(names.back(), id);
            auto b = n[names.back()].get_epr(names.front(), id);
            if (!a || !b) {
                pass = false;
                break;
            }
            worst = std::min(worst, phi_plus(*a, *b));
            if (trial % 2) {
                a->h();
                b->h();
                xx += a->measure() == b->measure();
            } else {
                zz += a->measure() == b->measure();
            }
        }
        pass = pass && worst >= 1 - 1e-9 && zz == 200 && xx == 200 && n->backend()->live_qubits() == 0;
        detail += std::to_string(hops) + " hops: F>=" + fmt("%.12f", worst) + " ZZ " + std::to_string(zz) +
                  "/200 XX " + std::to_string(xx) + "/200; ";
    }
    return {pass, detail};
}

// 5. Data qubits scenario over 200 seeds.
Outcome data_qubits_runs() {
    int complete = 0;
    double ones = 0, measured = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto r = scenario_data_qubits(seed);
        const auto& m = r.metrics;
        if (m.at("qubits_sent") == 5 && m.at("acks") == 5 && m.at("qubits_received") == 5) ++complete;
        ones += m.at("ones");
        measured += m.at("qubits_received");
    }
    const double f = measured > 0 ? ones / measured : 0;
    return {complete == 200 && f >= 0.45 && f <= 0.55,
            std::to_string(complete) + "/200 complete runs, ones fraction " + fmt("%.4f", f)};
}

// 6. Anonymous entanglement over 100 seeds, plus the exhaustive parity identity.
Outcome anonymous_runs() {
    int zero = 0, faithful = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto r = scenario_anonymous_entanglement(seed);
        if (r.metrics.at("teleported_bit") == 0) ++zero;
        if (r.metrics.at("pair_fidelity") >= 1 - 1e-9) ++faithful;
    }
    int identity = 0;
    for (int pattern = 0; pattern < 16; ++pattern) {
        const int mb = pattern & 1, mc = (pattern >> 1) & 1, bd = (pattern >> 2) & 1;
        oracle::State s(4);
        s.apply1(oracle::single(GateKind::H), 0);
        for (int t = 1; t < 4; ++t) s.apply2(oracle::two(GateKind::CNOT), 0, t);
        s.apply1(oracle::single(GateKind::H), 0);
        s.apply1(oracle::single(GateKind::H), 1);
        s.project(0, mb);
        s.project(1, mc);
        if (bd) s.apply1(oracle::single(GateKind::Z), 2);
        if (mb ^ mc ^ bd) s.apply1(oracle::single(GateKind::Z), 3);
        const int base = mb | (mc << 1);
        if (std::abs(std::norm((s.vec()(base) + s.vec()(base | 12)) / std::sqrt(2.0)) - 1) < 1e-12) ++identity;
    }
    return {zero == 100 && faithful == 100 && identity == 16,
            "bit 0 in " + std::to_string(zero) + "/100, fidelity ok in " + std::to_string(faithful) +
                "/100, parity identity " + std::to_string(identity) + "/16 patterns"};
}

// Independent argmin over every simple path (DFS) of a weighted graph.
double best_weight(const DiGraph& g, const std::string& at, const std::string& target, std::set<std::string>& seen) {
    if (at == target) return 0;
    double best = INFINITY;
    for (const auto& [next, w] : g.at(at)) {
        if (seen.count(next)) continue;
        seen.insert(next);
        best = std::min(best, w + best_weight(g, next, target, seen));
        seen.erase(next);
    }
    return best;
}

// 7. Entanglement routing audit.
Outcome routing_audit() {
    const auto run = run_entanglement_routing(7, {});
    std::size_t violations = 0, weight_errors = 0, zero_edges = 0;
    for (const auto& rec : run.records) {
        DiGraph expected;
        for (const auto& [u, nbrs] : rec.pairs) {
            expected[u];
            for (const auto& [v, count] : nbrs) {
                expected[u][v] = count == 0 ? 1'000'000.0 : 1.0 / static_cast<double>(count);
                if (count == 0) ++zero_edges;
            }
        }
        if (expected != rec.snapshot) ++weight_errors;
        double chosen = 0;
        for (std::size_t i = 0; i + 1 < rec.chosen.size(); ++i) chosen += expected.at(rec.chosen[i]).at(rec.chosen[i + 1]);
        std::set<std::string> seen{rec.source};
        if (chosen > best_weight(expected, rec.source, rec.target, seen) + 1e-12) ++violations;
    }
    const auto& m = run.result.metrics;
    const bool pass = m.at("messages_sent") == 100 && m.at("messages_correct") == 100 && violations == 0 &&
                      weight_errors == 0 && zero_edges > 0;
    return {pass, std::to_string(run.records.size()) + " routing decisions, " + std::to_string(violations) +
                      " argmin violations, " + std::to_string(weight_errors) + " weight mismatches, " +
                      std::to_string(zero_edges) + " zero-pair edges seen, " +
                      std::to_string(static_cast<int>(m.at("messages_correct"))) + "/100 decoded"};
}

// 8. BB84 with and without the sniffing relay.
Outcome bb84() {
    const auto clean = scenario_eavesdropping(1, 256, false);
    Network net(1);
    populate(net, eavesdropping_topology());
    bool keys_ok = false;
    double key_qber = -1;
    try {
        const auto k = qkd_keygen(net, "Alice", "Bob", 32);
        keys_ok = k.key_a.size() == 32 && k.key_a == k.key_b;
        key_qber = k.qber;
    } catch (const InsufficientKey&) {
    }
    net.stop();

    int in_band = 0, prefixed = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto r = scenario_eavesdropping(seed, 256, true);
        const double q = r.metrics.at("qber");
        if (q >= 0.15 && q <= 0.35) ++in_band;
        if (r.metrics.at("prefix_detected") == 1) ++prefixed;
    }
    const bool pass =
        clean.metrics.at("qber") == 0 && keys_ok && key_qber == 0 && in_band >= 95 && prefixed == 100;
    return {pass, "clean qber " + fmt("%.3f", clean.metrics.at("qber")) + ", 32-bit keys " +
                      (keys_ok ? "identical" : "differ") + "; sniffed qber in [0.15, 0.35] for " +
                      std::to_string(in_band) + "/100 (need 95), prefix seen " + std::to_string(prefixed) + "/100"};
}

// 9. Memory limits under 20 concurrent senders.
Outcome memory_limits() {
    bool pass = true;
    std::string detail;
    for (MemoryKind kind : {MemoryKind::epr, MemoryKind::data, MemoryKind::total}) {
        for (int limit = 0; limit <= 2; ++limit) {
            fixtures::Net n(90 + limit);
            std::vector<std::string> names{"R"};
            std::vector<fixtures::Link> links;
            for (int i = 0; i < 20; ++i) {
                names.push_back("S" + std::to_string(i));
                links.push_back({names.back(), "R"});
            }
            n.build(names, links);
            Host& r = n["R"];
            r.set_memory_limit(kind, limit);
            auto stored = [&] {
                return kind == MemoryKind::epr ? r.epr_count()
                       : kind == MemoryKind::data ? r.data_count()
                                                  : r.epr_count() + r.data_count() + r.ghz_count();
            };
            std::size_t max_seen = 0;
            n->scheduler().set_observer([&] { max_seen = std::max(max_seen, stored()); });
            int acked = 0, rejected = 0;
            std::vector<TaskHandle> tasks;
            for (int i = 0; i < 20; ++i)
                tasks.push_back(n["S" + std::to_string(i)].run_protocol([&, i](Host& h) {
                    AckResult res;
                    const bool epr = kind == MemoryKind::epr || (kind == MemoryKind::total && i % 2 == 0);
                    if (epr) {
                        res = h.send_epr("R", std::nullopt, true).status;
                    } else {
                        auto q = h.new_qubit();
                        res = h.send_qubit("R", q, true);
                    }
                    if (res == AckResult::acked) ++acked;
                    if (res == AckResult::rejected) ++rejected;
                }));
            for (auto& t : tasks) t.wait();
            n->scheduler().set_observer({});
            const bool ok = acked == limit && rejected == 20 - limit && max_seen <= static_cast<std::size_t>(limit) &&
                            n->counter("nack_packets") == static_cast<std::uint64_t>(20 - limit);
            pass = pass && ok;
            if (!ok)
                detail += std::string(kind == MemoryKind::epr ? "epr" : kind == MemoryKind::data ? "data" : "total") +
                          "=" + std::to_string(limit) + " acked " + std::to_string(acked) + " max " +
                          std::to_string(max_seen) + "; ";
        }
    }
    return {pass, pass ? "9 configurations, counts within limits, every rejection NACKed" : detail};
}

// 10. Same seed, same metrics JSON, twice in a row.
Outcome determinism() {
    int same = 0;
    const auto names = scenario_names();
    for (const auto& name : names) {
        const std::string a = to_json(run_scenario(name, 2024))["metrics"].dump();
        const std::string b = to_json(run_scenario(name, 2024))["metrics"].dump();
        if (a == b) ++same;
    }
    return {same == static_cast<int>(names.size()),
            std::to_string(same) + "/" + std::to_string(names.size()) + " scenarios replay identically"};
}

// 11. Classical-only and quantum-only links stay separate.
Outcome graph_separation() {
    fixtures::Net n(11);
    n.build({"A", "B", "C"}, {{"A", "B", LinkKind::classical}, {"B", "C", LinkKind::quantum}});
    auto q = n["A"].new_qubit();
    const bool qubit_refused = n["A"].send_qubit("B", q, true) == AckResult::no_route;
    const bool classical_refused = n["B"].send_classical("C", "x", true) == AckResult::no_route;
    bool q_throws = false, c_throws = false;
    try {
        n->route(GraphKind::quantum, "A", "B");
    } catch (const NoRoute&) {
        q_throws = true;
    }
    try {
        n->route(GraphKind::classical, "B", "C");
    } catch (const NoRoute&) {
        c_throws = true;
    }
    return {qubit_refused && classical_refused && q_throws && c_throws,
            std::string("qubit over classical-only edge ") + (qubit_refused && q_throws ? "refused" : "ACCEPTED") +
                ", classical over quantum-only edge " + (classical_refused && c_throws ? "refused" : "ACCEPTED")};
}

}  // namespace

int main() {
    EventLog::set_default_stderr_level(LogLevel::off);
    const std::vector<Criterion> criteria{
        {1, "backend matches dense oracle", 30, backend_oracle},
        {2, "teleportation fidelity", 30, teleportation},
        {3, "superdense exhaustive", 60, superdense},
        {4, "swap chains", 60, swap_chains},
        {5, "data qubits scenario", 60, data_qubits_runs},
        {6, "anonymous entanglement scenario", 60, anonymous_runs},
        {7, "entanglement routing audit", 60, routing_audit},
        {8, "eavesdropping and BB84", 90, bb84},
        {9, "memory limits", 30, memory_limits},
        {10, "determinism", 120, determinism},
        {11, "graph separation", 10, graph_separation},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s [%d] %s: %s (%.2fs, limit %.0fs%s)\n", pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                    o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
