#include <cmath>

#include "qnetsim/core/errors.hpp"
#include "session.hpp"

namespace qnetsim {

namespace {

constexpr double kWait = 30.0;

// Reads a frame of known length from the end of the next message from `from`.
std::string read_frame(Host& host, const std::string& from, std::size_t length) {
    auto m = host.get_next_classical(from, kWait);
    if (!m) throw InvalidMessage(host.host_id() + " got no frame from " + from);
    if (m->content.size() < length) throw InvalidMessage(host.host_id() + " got a short frame from " + from);
    return m->content.substr(m->content.size() - length);
}

std::vector<std::size_t> sift(const std::string& bases_a, const std::string& bases_b) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bases_a.size(); ++i)
        if (bases_b[i] != '-' && bases_a[i] == bases_b[i]) out.push_back(i);
    return out;
}

KeyResult finish_keygen(const Bb84Outcome& o, std::size_t key_len) {
    const std::size_t needed = key_len + (key_len + 1) / 2;
    if (o.sifted < needed)
        throw InsufficientKey("only " + std::to_string(o.sifted) + " sifted bits, need " + std::to_string(needed));
    if (o.qber > kQberAbort)
        throw InsufficientKey("QBER " + std::to_string(o.qber) + " above abort threshold");
    return KeyResult{o.kept_a.substr(0, key_len), o.kept_b.substr(0, key_len), o.qber, o.sifted};
}

std::size_t keygen_sample(std::size_t key_len, std::size_t sifted) { return sifted > key_len ? sifted - key_len : 0; }

}  // namespace

Bb84Outcome run_bb84(Network& network, const std::string& a, const std::string& b, std::size_t n_raw,
                     const std::function<std::size_t(std::size_t)>& sample_size) {
    Bb84Outcome out;
    out.raw = n_raw;
    std::string bits_a(n_raw, '0'), bases_a(n_raw, '0');
    std::string bits_b(n_raw, '0'), bases_b(n_raw, '-');
    auto sifted_bits = [](const std::string& bits, const std::vector<std::size_t>& idx) {
        std::string s;
        for (auto i : idx) s += bits[i];
        return s;
    };

    auto alice = network.host(a)->run_protocol([&](Host& host) {
        for (std::size_t i = 0; i < n_raw; ++i) {
            bits_a[i] = static_cast<char>('0' + host.random_bit());
            bases_a[i] = static_cast<char>('0' + host.random_bit());
            auto q = host.new_qubit();
            if (bits_a[i] == '1') q.x();
            if (bases_a[i] == '1') q.h();
            host.send_qubit(b, q, true);
        }
        host.send_classical(b, bases_a, true);
        const std::string theirs = read_frame(host, b, n_raw);
        const auto idx = sift(bases_a, theirs);
        const std::string mine = sifted_bits(bits_a, idx);
        const std::size_t sample = std::min(sample_size(idx.size()), idx.size());
        host.send_classical(b, mine.substr(mine.size() - sample), true);
        out.kept_a = mine.substr(0, mine.size() - sample);
    });

    auto bob = network.host(b)->run_protocol([&](Host& host) {
        for (std::size_t i = 0; i < n_raw; ++i) {
            auto q = host.get_data_qubit(a, std::nullopt, kWait);
            const int basis = host.random_bit();
            if (!q) continue;
            bases_b[i] = static_cast<char>('0' + basis);
            if (basis == 1) q->h();
            bits_b[i] = static_cast<char>('0' + q->measure());
        }
        const std::string theirs = read_frame(host, a, n_raw);
        host.send_classical(a, bases_b, true);
        const auto idx = sift(theirs, bases_b);
        const std::string mine = sifted_bits(bits_b, idx);
        const std::size_t sample = std::min(sample_size(idx.size()), idx.size());
        const std::string revealed = read_frame(host, a, sample);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < sample; ++i)
            if (revealed[i] != mine[mine.size() - sample + i]) ++errors;
        out.sifted = idx.size();
        out.sample = sample;
        out.errors = errors;
        out.qber = sample == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(sample);
        out.kept_b = mine.substr(0, mine.size() - sample);
    });

    alice.wait();
    bob.wait();
    detail::rethrow_errors({alice, bob});
    if (!alice.done() || !bob.done()) throw InvalidMessage("BB84 exchange stalled");
    return out;
}

KeyResult qkd_keygen(Network& network, const std::string& a, const std::string& b, std::size_t key_len) {
    if (key_len == 0) throw std::invalid_argument("key_len must be positive");
    const auto outcome =
        run_bb84(network, a, b, 4 * key_len, [key_len](std::size_t sifted) { return keygen_sample(key_len, sifted); });
    return finish_keygen(outcome, key_len);
}

ScenarioResult scenario_eavesdropping(std::uint64_t seed, int n_bits, bool sniffing, const ScenarioOptions& options) {
    if (n_bits < 64) throw std::invalid_argument("n_bits must be at least 64");
    detail::Session s("eavesdropping", seed, options, eavesdropping_topology(), {"Alice", "Eve", "Bob"});
    Host& eve = s["Eve"];
    if (sniffing) {
        eve.q_relay_sniffing = true;
        eve.set_q_sniff_fn([](const std::string&, const std::string&, qsim::Qubit& q) { q.measure(true); });
        eve.c_relay_sniffing = true;
        eve.set_c_sniff_fn(
            [](const std::string&, const std::string&, Message& m) { m.content = kSniffPrefix + m.content; });
    }

    const std::string probe = "hello Bob";
    bool prefix = false;
    auto writer = s["Alice"].run_protocol([&](Host& host) { host.send_classical("Bob", probe, true); });
    auto reader = s["Bob"].run_protocol([&](Host& host) {
        auto m = host.get_next_classical("Alice", 10);
        prefix = m && m->content.rfind(kSniffPrefix, 0) == 0;
        if (m) s.note(host.host_id(), "received", m->content);
    });
    writer.wait();
    reader.wait();
    detail::rethrow_errors({writer, reader});

    const auto o = run_bb84(s.net(), "Alice", "Bob", static_cast<std::size_t>(n_bits),
                            [](std::size_t sifted) { return sifted / 2; });
    s.note("Bob", "qber", std::to_string(o.errors) + "/" + std::to_string(o.sample));

    s.metric("sniffing") = sniffing ? 1 : 0;
    s.metric("raw_len") = n_bits;
    s.metric("sifted_len") = static_cast<double>(o.sifted);
    s.metric("sample_len") = static_cast<double>(o.sample);
    s.metric("sample_errors") = static_cast<double>(o.errors);
    s.metric("qber") = o.qber;
    s.metric("prefix_detected") = prefix ? 1 : 0;
    auto result = s.finish();
    const bool detected = prefix && o.qber > kQberAbort;
    const bool clean = !prefix && o.qber == 0;
    result.success = (sniffing ? detected : clean) && result.metrics["live_qubits_after_teardown"] == 0;
    return result;
}

ScenarioResult scenario_qkd(std::uint64_t seed, int key_len, const ScenarioOptions& options) {
    if (key_len < 1) throw std::invalid_argument("key_len must be positive");
    detail::Session s("qkd", seed, options, qkd_topology(), {"Alice", "Bob"});
    const auto len = static_cast<std::size_t>(key_len);
    const auto o = run_bb84(s.net(), "Alice", "Bob", 4 * len,
                            [len](std::size_t sifted) { return keygen_sample(len, sifted); });
    bool aborted = false;
    bool match = false;
    try {
        const auto key = finish_keygen(o, len);
        match = key.key_a == key.key_b;
        s.note("Alice", "key", key.key_a);
        s.note("Bob", "key", key.key_b);
    } catch (const InsufficientKey& e) {
        aborted = true;
        s.note("Alice", "abort", e.what());
    }
    s.metric("key_len") = key_len;
    s.metric("sifted_len") = static_cast<double>(o.sifted);
    s.metric("qber") = o.qber;
    s.metric("aborted") = aborted ? 1 : 0;
    s.metric("keys_match") = match ? 1 : 0;
    auto result = s.finish();
    result.success = !aborted && match && result.metrics["live_qubits_after_teardown"] == 0;
    return result;
}

}  // namespace qnetsim
