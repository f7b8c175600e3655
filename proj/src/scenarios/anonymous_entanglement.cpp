#include <string>

#include "qnetsim/core/errors.hpp"
#include "session.hpp"

#ifdef QNETSIM_DIAGNOSTICS
#include "qnetsim/qsim/diagnostics.hpp"
#endif

namespace qnetsim {

namespace {

constexpr double kWait = 10.0;
const std::string kEprId = "12345";

}  // namespace

ScenarioResult scenario_anonymous_entanglement(std::uint64_t seed, const ScenarioOptions& options) {
    detail::Session s("anonymous_entanglement", seed, options, anonymous_entanglement_topology(),
                      {"A", "B", "C", "D", "E"});
    int shares = 0;
    int teleported_bit = -1;
    int broadcasts_seen = 0;
    double pair_fidelity = -1;

    auto distributor = s["A"].run_protocol([&](Host& host) {
        // No classical edge leads back to A, so nobody could acknowledge.
        const auto r = host.send_ghz({"B", "C", "D", "E"}, true, false);
        s.note(host.host_id(), "ghz", r.qubit_id + " " + std::string(to_string(r.status)));
    });

    auto node = [&](Host& host) {
        auto q = host.get_ghz("A", kWait);
        if (!q) {
            s.note(host.host_id(), "failed", "no GHZ share");
            return;
        }
        ++shares;
        q->h();
        const int m = q->measure();
        host.send_broadcast(std::to_string(m));
    };

    auto sender = [&](Host& host) {
        auto q = host.get_ghz("A", kWait);
        if (!q) {
            s.note(host.host_id(), "failed", "no GHZ share");
            return;
        }
        ++shares;
        const int b = host.random_bit();
        host.send_broadcast(std::to_string(b));
        if (b == 1) q->z();
        host.add_epr("E", std::move(*q), kEprId);
#ifdef QNETSIM_DIAGNOSTICS
        Host& receiver = *host.network().host("E");
        if (host.network().scheduler().wait_until([&] { return receiver.has_epr("D", kEprId); }, kWait)) {
            const auto* mine = host.find_epr("E", kEprId);
            const auto* theirs = receiver.find_epr("D", kEprId);
            if (mine && theirs) pair_fidelity = qsim::phi_plus_fidelity(*mine, *theirs);
        }
#endif
        auto payload = host.new_qubit();
        const AckResult r = host.send_teleport("E", payload, true);
        s.note(host.host_id(), "teleport", std::string(to_string(r)));
        host.empty_classical();
    };

    auto receiver = [&](Host& host) {
        auto q = host.get_ghz("A", kWait);
        if (!q) {
            s.note(host.host_id(), "failed", "no GHZ share");
            return;
        }
        ++shares;
        host.send_broadcast(std::to_string(host.random_bit()));
        const bool all = host.network().scheduler().wait_until([&] { return host.classical().size() >= 3; }, kWait);
        if (!all) {
            s.note(host.host_id(), "failed", "broadcasts missing");
            return;
        }
        // The phase left on the pair is the XOR of everyone else's bits.
        int parity = 0;
        for (const auto& m : host.classical()) {
            ++broadcasts_seen;
            parity ^= m.content == "1" ? 1 : 0;
        }
        if (parity == 1) q->z();
        host.add_epr("D", std::move(*q), kEprId);
        auto arrived = host.get_data_qubit("D", std::nullopt, kWait);
        if (!arrived) {
            s.note(host.host_id(), "failed", "teleported qubit missing");
            return;
        }
        teleported_bit = arrived->measure();
        s.note(host.host_id(), "measured", std::to_string(teleported_bit));
    };

    std::vector<TaskHandle> tasks{distributor};
    tasks.push_back(s["B"].run_protocol(node));
    tasks.push_back(s["C"].run_protocol(node));
    tasks.push_back(s["D"].run_protocol(sender));
    tasks.push_back(s["E"].run_protocol(receiver));
    for (auto& t : tasks) t.wait();
    detail::rethrow_errors(tasks);

    s.metric("ghz_shares") = shares;
    s.metric("teleported_bit") = teleported_bit;
    s.metric("broadcasts_seen") = broadcasts_seen;
#ifdef QNETSIM_DIAGNOSTICS
    s.metric("pair_fidelity") = pair_fidelity;
#endif
    auto result = s.finish();
    result.success = shares == 4 && teleported_bit == 0 && broadcasts_seen == 3 &&
                     result.metrics["live_qubits_after_teardown"] == 0;
#ifdef QNETSIM_DIAGNOSTICS
    result.success = result.success && pair_fidelity >= 1 - 1e-9;
#endif
    return result;
}

}  // namespace qnetsim
