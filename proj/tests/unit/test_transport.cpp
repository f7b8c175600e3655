#include <gtest/gtest.h>

#include <random>

#include "oracle/dense_oracle.hpp"
#include "qnetsim/core/errors.hpp"
#include "qnetsim/qsim/diagnostics.hpp"
#include "qnetsim/transport/transport.hpp"
#include "support/fixtures.hpp"

using namespace qnetsim;
using qsim::GateKind;
using qsim::Qubit;

namespace {

/// Random pure single-qubit state from a Haar-ish rotation.
struct Angles {
    double theta, phi;
};

Angles random_angles(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    return {2 * std::acos(std::sqrt(u(rng))), 2 * M_PI * u(rng)};
}

oracle::Vec prepared(const Angles& a) {
    oracle::State s(1);
    s.apply1(oracle::single(GateKind::RY, a.theta), 0);
    s.apply1(oracle::single(GateKind::RZ, a.phi), 0);
    return s.vec();
}

void prepare(Qubit& q, const Angles& a) {
    q.ry(a.theta);
    q.rz(a.phi);
}

double fidelity(const oracle::Vec& want, const Qubit& q) {
    const auto snap = q.inspect();
    EXPECT_EQ(snap.amplitudes.size(), 2u);
    const auto overlap = std::conj(want(0)) * snap.amplitudes[0] + std::conj(want(1)) * snap.amplitudes[1];
    return std::norm(overlap);
}

}  // namespace

TEST(TeleportEncode, OutcomeFrequenciesQuarter) {
    auto be = std::make_shared<qsim::Backend>(41);
    std::map<std::pair<int, int>, int> counts;
    for (int i = 0; i < 2000; ++i) {
        auto q = Qubit::create(be, "A");
        auto [a, b] = qsim::make_epr(be, "A", "B", "e");
        const auto c = transport::teleport_encode(q, a);
        ++counts[{c.m1, c.m2}];
        b.release();
    }
    ASSERT_EQ(counts.size(), 4u);
    for (const auto& [k, n] : counts) EXPECT_NEAR(n / 2000.0, 0.25, 0.03);
}

TEST(TeleportEncode, ReceiverStateIsPauliOfInput) {
    std::mt19937_64 rng(42);
    auto be = std::make_shared<qsim::Backend>(42);
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 100; ++i) {
        const Angles ang = random_angles(rng);
        auto q = Qubit::create(be, "A");
        prepare(q, ang);
        auto [a, b] = qsim::make_epr(be, "A", "B", "e");
        const auto c = transport::teleport_encode(q, a);
        EXPECT_FALSE(q.valid());
        EXPECT_FALSE(a.valid());
        seen.insert({c.m1, c.m2});
        oracle::Vec want = prepared(ang);
        if (c.m2) want = oracle::single(GateKind::X) * want;
        if (c.m1) want = oracle::single(GateKind::Z) * want;
        EXPECT_NEAR(fidelity(want, b), 1.0, 1e-9);
        b.release();
    }
    EXPECT_EQ(seen.size(), 4u);
}

TEST(TeleportEncode, DeadQubitThrows) {
    auto be = std::make_shared<qsim::Backend>(1);
    auto q = Qubit::create(be, "A");
    auto [a, b] = qsim::make_epr(be, "A", "B");
    q.release();
    EXPECT_THROW(transport::teleport_encode(q, a), InvalidQubit);
}

TEST(TeleportDecode, CorrectionTable) {
    auto be = std::make_shared<qsim::Backend>(1);
    // (0,0): untouched; (1,1): X then Z, i.e. ZX|0> = -|1>, ZX|1> = |0>.
    auto q0 = Qubit::create(be, "B", "e");
    auto r0 = transport::teleport_decode(std::move(q0), CorrectionBits{0, 0, "e"});
    EXPECT_NEAR(std::norm(r0.inspect().amplitudes[0]), 1.0, 1e-12);

    auto q1 = Qubit::create(be, "B", "f");
    auto r1 = transport::teleport_decode(std::move(q1), CorrectionBits{1, 1, "f"});
    const auto amps = r1.inspect().amplitudes;
    EXPECT_NEAR(amps[1].real(), -1.0, 1e-12);

    auto q2 = Qubit::create(be, "B", "g");
    q2.x();
    auto r2 = transport::teleport_decode(std::move(q2), CorrectionBits{1, 1, "g"});
    EXPECT_NEAR(r2.inspect().amplitudes[0].real(), 1.0, 1e-12);
}

TEST(TeleportDecode, IdMismatchIsMissingEntanglement) {
    auto be = std::make_shared<qsim::Backend>(1);
    auto q = Qubit::create(be, "B", "x");
    EXPECT_THROW(transport::teleport_decode(std::move(q), CorrectionBits{0, 0, "y"}), MissingEntanglement);
}

TEST(TeleportRoundTrip, FiftyRandomStates) {
    std::mt19937_64 rng(43);
    auto be = std::make_shared<qsim::Backend>(43);
    for (int i = 0; i < 50; ++i) {
        const Angles ang = random_angles(rng);
        auto q = Qubit::create(be, "A");
        prepare(q, ang);
        auto [a, b] = qsim::make_epr(be, "A", "B", "e" + std::to_string(i));
        const auto c = transport::teleport_encode(q, a);
        auto out = transport::teleport_decode(std::move(b), c);
        EXPECT_NEAR(fidelity(prepared(ang), out), 1.0, 1e-9);
        out.release();
    }
    EXPECT_EQ(be->live_qubits(), 0u);
}

TEST(SuperdenseEncode, JointStatesMatchOracle) {
    const std::map<std::string, std::vector<GateKind>> table = {
        {"00", {}}, {"01", {GateKind::X}}, {"10", {GateKind::Z}}, {"11", {GateKind::Z, GateKind::X}}};
    std::map<std::string, oracle::Vec> states;
    for (const auto& [bits, gates] : table) {
        auto be = std::make_shared<qsim::Backend>(1);
        auto [a, b] = qsim::make_epr(be, "A", "B");
        transport::superdense_encode(bits, a);

        oracle::State ref(2);
        ref.apply1(oracle::single(GateKind::H), 0);
        ref.apply2(oracle::two(GateKind::CNOT), 0, 1);
        for (GateKind g : gates) ref.apply1(oracle::single(g), 0);

        const auto got = oracle::joint_state({a.inspect()}, {a.key(), b.key()});
        for (int x = 0; x < 4; ++x) EXPECT_NEAR(std::abs(got(x) - ref.vec()(x)), 0.0, 1e-12) << bits << " " << x;
        states[bits] = got;
    }
    // "00" stays Phi+; "11" is the singlet up to sign.
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(states["00"](0) - r) + std::abs(states["00"](3) - r), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(states["11"](1)), r, 1e-12);
    EXPECT_NEAR(std::abs(states["11"](2)), r, 1e-12);
    EXPECT_NEAR(std::abs(states["11"](1) + states["11"](2)), 0.0, 1e-12);
    for (const auto& [x, u] : states)
        for (const auto& [y, v] : states)
            if (x != y) EXPECT_NEAR(std::abs(u.dot(v)), 0.0, 1e-12) << x << " vs " << y;
}

TEST(SuperdenseEncode, InvalidBitsRejected) {
    auto be = std::make_shared<qsim::Backend>(1);
    auto q = Qubit::create(be, "A");
    for (const std::string bad : {"", "0", "2a", "001", "ab"}) EXPECT_THROW(transport::superdense_encode(bad, q), InvalidMessage);
}

TEST(SuperdenseRoundTrip, ExhaustiveTable) {
    auto be = std::make_shared<qsim::Backend>(44);
    for (int rep = 0; rep < 25; ++rep)
        for (const std::string bits : {"00", "01", "10", "11"}) {
            auto [a, b] = qsim::make_epr(be, "A", "B", "p");
            transport::superdense_encode(bits, a);
            EXPECT_EQ(transport::superdense_decode(std::move(a), std::move(b)), bits);
        }
    EXPECT_EQ(be->live_qubits(), 0u);
}

TEST(SuperdenseDecode, IdMismatchRejected) {
    auto be = std::make_shared<qsim::Backend>(1);
    auto [a, b] = qsim::make_epr(be, "A", "B", "p");
    b.set_id("q");
    EXPECT_THROW(transport::superdense_decode(std::move(a), std::move(b)), MissingEntanglement);
}

TEST(MakeAck, MirrorsOriginal) {
    TransportPacket t;
    t.sender = "A";
    t.receiver = "B";
    t.protocol = ProtocolTag::SEND_EPR;
    t.sequence = 7;
    t.meta["qubit_id"] = "abc";
    const auto ack = transport::make_ack(t, "NACK");
    EXPECT_EQ(ack.sender, "B");
    EXPECT_EQ(ack.receiver, "A");
    EXPECT_EQ(ack.protocol, ProtocolTag::ACK);
    const auto& rec = std::get<ControlRecord>(ack.payload);
    EXPECT_EQ(rec.kind, "NACK");
    EXPECT_EQ(rec.sequence, 7u);
    EXPECT_EQ(rec.answers, ProtocolTag::SEND_EPR);
    EXPECT_EQ(rec.ref_id, "abc");
}

TEST(EnsureEpr, ExistingPairReused) {
    fixtures::Net n;
    n.build({"A", "B"}, fixtures::chain({"A", "B"}));
    const auto id = transport::ensure_epr(*n, "A", "B");
    const auto created = n->counter("epr_created");
    EXPECT_EQ(transport::ensure_epr(*n, "A", "B"), id);
    EXPECT_EQ(n->counter("epr_created"), created);
    EXPECT_TRUE(n["B"].has_epr("A", id));
}

TEST(EnsureEpr, AdjacentCreatesOne) {
    fixtures::Net n;
    n.build({"A", "B"}, fixtures::chain({"A", "B"}));
    transport::ensure_epr(*n, "A", "B");
    EXPECT_EQ(n->counter("epr_created"), 1u);
    EXPECT_EQ(n->counter("swap_chains"), 0u);
}

TEST(EnsureEpr, ThreeHopSwapChain) {
    fixtures::Net n(45);
    n.build({"A", "B", "C", "D"}, fixtures::chain({"A", "B", "C", "D"}));
    n->set_use_ent_swap(true);
    for (int i = 0; i < 20; ++i) {
        const auto id = transport::ensure_epr(*n, "A", "D");
        EXPECT_EQ(n->counter("swap_chains"), static_cast<std::uint64_t>(i + 1));
        auto a = n["A"].get_epr("D", id);
        auto d = n["D"].get_epr("A", id);
        ASSERT_TRUE(a && d);
        EXPECT_NEAR(qsim::phi_plus_fidelity(*a, *d), 1.0, 1e-9);
        a->release();
        d->release();
    }
    EXPECT_EQ(n->backend()->live_qubits(), 0u);
}

TEST(EnsureEpr, NoRouteAndUnknownHost) {
    fixtures::Net n;
    n.build({"A", "B"}, {{"A", "B", LinkKind::classical}});
    EXPECT_THROW(transport::ensure_epr(*n, "A", "B"), NoRoute);
    EXPECT_THROW(transport::ensure_epr(*n, "A", "Z"), UnknownHost);
}

TEST(Acks, NoAckWithoutAwait) {
    fixtures::Net n;
    n.build({"A", "B"}, fixtures::chain({"A", "B"}));
    n["A"].send_classical("B", "x");
    n->scheduler().run_for(2);
    EXPECT_EQ(n->counter("ack_packets"), 0u);
    n["A"].send_classical("B", "y", true);
    EXPECT_EQ(n->counter("ack_packets"), 1u);
}

TEST(Acks, LateAckResolvesNothing) {
    fixtures::Net n;
    n.build({"A", "B"}, fixtures::chain({"A", "B"}));
    n["A"].set_ack_timeout(0.01);
    n["B"].set_delay(1.0);
    EXPECT_EQ(n["A"].send_classical("B", "slow", true), AckResult::timeout);
    n->scheduler().run_for(5);
    EXPECT_TRUE(n["A"].is_idle());
    EXPECT_EQ(n->counter("ack_packets"), 1u);
}

TEST(EprAccounting, EachTransmissionConsumesOnePairPerSide) {
    fixtures::Net n(46);
    n.build({"A", "B"}, fixtures::chain({"A", "B"}));
    for (int i = 0; i < 3; ++i) n["A"].send_epr("B", std::nullopt, true);
    ASSERT_EQ(n["A"].epr_count("B"), 3u);
    ASSERT_EQ(n["B"].epr_count("A"), 3u);
    auto q = n["A"].new_qubit();
    n["A"].send_teleport("B", q, true);
    EXPECT_EQ(n["A"].epr_count("B"), 2u);
    EXPECT_EQ(n["B"].epr_count("A"), 2u);
    n["A"].send_superdense("B", "10", true);
    EXPECT_EQ(n["A"].epr_count("B"), 1u);
    EXPECT_EQ(n["B"].epr_count("A"), 1u);
}
