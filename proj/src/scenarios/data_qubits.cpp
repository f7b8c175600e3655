#include "session.hpp"

namespace qnetsim {

ScenarioResult scenario_data_qubits(std::uint64_t seed, const ScenarioOptions& options) {
    constexpr int kQubits = 5;
    detail::Session s("data_qubits", seed, options, data_qubits_topology(), {"Alice", "Dean"});
    int acks = 0;
    int received = 0;
    int ones = 0;

    auto sender = s["Alice"].run_protocol([&](Host& host) {
        for (int i = 0; i < kQubits; ++i) {
            auto q = host.new_qubit();
            q.h();
            const AckResult r = host.send_qubit("Dean", q, true);
            if (r == AckResult::acked) ++acks;
            s.note(host.host_id(), "qubit", std::to_string(i) + " " + std::string(to_string(r)));
        }
    });
    auto receiver = s["Dean"].run_protocol([&](Host& host) {
        for (int i = 0; i < kQubits; ++i) {
            auto q = host.get_data_qubit("Alice", std::nullopt, 10);
            if (!q) {
                s.note(host.host_id(), "missing", "qubit did not arrive");
                continue;
            }
            ++received;
            const int m = q->measure();
            ones += m;
            s.note(host.host_id(), "measured", std::to_string(m));
        }
    });
    sender.wait();
    receiver.wait();
    detail::rethrow_errors({sender, receiver});

    s.metric("qubits_sent") = kQubits;
    s.metric("qubits_received") = received;
    s.metric("acks") = acks;
    s.metric("ones") = ones;
    auto result = s.finish();
    result.success = received == kQubits && acks == kQubits && result.metrics["live_qubits_after_teardown"] == 0;
    return result;
}

}  // namespace qnetsim
