#include "qnetsim/core/packet.hpp"

#include <array>

#include "qnetsim/core/errors.hpp"

namespace qnetsim {

namespace {

constexpr std::array<std::string_view, 10> kTagNames = {
    "SEND_CLASSICAL", "SEND_QUBIT", "SEND_EPR", "SEND_TELEPORT",    "SEND_SUPERDENSE",
    "SEND_GHZ",       "SEND_BROADCAST", "ACK", "EPR_SWAP_CONTROL", "RELAY",
};

enum class PayloadKind : std::uint8_t { None = 0, Bytes = 1, Correction = 2, Control = 3, Qubit = 4 };

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
    }
    void u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(in_[pos_++]);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | u8();
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw DecodeError("truncated packet");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

void write_transport(Writer& w, const TransportPacket& p) {
    w.str(p.sender);
    w.str(p.receiver);
    w.u8(static_cast<std::uint8_t>(p.protocol));
    std::visit(
        [&w](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                w.u8(static_cast<std::uint8_t>(PayloadKind::None));
            } else if constexpr (std::is_same_v<T, std::string>) {
                w.u8(static_cast<std::uint8_t>(PayloadKind::Bytes));
                w.str(v);
            } else if constexpr (std::is_same_v<T, CorrectionBits>) {
                w.u8(static_cast<std::uint8_t>(PayloadKind::Correction));
                w.u8(static_cast<std::uint8_t>(v.m1));
                w.u8(static_cast<std::uint8_t>(v.m2));
                w.str(v.epr_id);
            } else if constexpr (std::is_same_v<T, ControlRecord>) {
                w.u8(static_cast<std::uint8_t>(PayloadKind::Control));
                w.str(v.kind);
                w.u64(v.sequence);
                w.u8(static_cast<std::uint8_t>(v.answers));
                w.str(v.ref_id);
            } else {
                throw InvalidMessage("qubit payloads cannot be serialized");
            }
        },
        p.payload);
    w.u64(p.sequence);
    w.u8(p.await_ack ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(p.meta.size()));
    for (const auto& [k, v] : p.meta) {
        w.str(k);
        w.str(v);
    }
}

ProtocolTag read_tag(Reader& r) {
    const std::uint8_t raw = r.u8();
    if (raw >= kTagNames.size()) throw DecodeError("unknown protocol tag " + std::to_string(raw));
    return static_cast<ProtocolTag>(raw);
}

int read_bit(Reader& r) {
    const std::uint8_t b = r.u8();
    if (b > 1) throw DecodeError("correction bit out of range");
    return b;
}

TransportPacket read_transport(Reader& r) {
    TransportPacket p;
    p.sender = r.str();
    p.receiver = r.str();
    p.protocol = read_tag(r);
    switch (static_cast<PayloadKind>(r.u8())) {
        case PayloadKind::None:
            break;
        case PayloadKind::Bytes:
            p.payload = r.str();
            break;
        case PayloadKind::Correction: {
            CorrectionBits c;
            c.m1 = read_bit(r);
            c.m2 = read_bit(r);
            c.epr_id = r.str();
            p.payload = std::move(c);
            break;
        }
        case PayloadKind::Control: {
            ControlRecord c;
            c.kind = r.str();
            c.sequence = r.u64();
            c.answers = read_tag(r);
            c.ref_id = r.str();
            p.payload = std::move(c);
            break;
        }
        default:
            throw DecodeError("unknown payload kind");
    }
    p.sequence = r.u64();
    const std::uint8_t ack = r.u8();
    if (ack > 1) throw DecodeError("await_ack flag out of range");
    p.await_ack = ack == 1;
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string k = r.str();
        p.meta[std::move(k)] = r.str();
    }
    return p;
}

bool same_payload(const Payload& a, const Payload& b) {
    if (a.index() != b.index()) return false;
    if (const auto* qa = std::get_if<qsim::Qubit>(&a)) {
        const auto& qb = std::get<qsim::Qubit>(b);
        return qa->backend() == qb.backend() && qa->key() == qb.key();
    }
    return std::visit(
        [&b](const auto& va) {
            using T = std::decay_t<decltype(va)>;
            if constexpr (std::is_same_v<T, qsim::Qubit>) {
                return false;
            } else {
                return va == std::get<T>(b);
            }
        },
        a);
}

}  // namespace

std::string_view to_string(ProtocolTag tag) noexcept {
    const auto i = static_cast<std::size_t>(tag);
    return i < kTagNames.size() ? kTagNames[i] : "UNKNOWN";
}

std::optional<ProtocolTag> parse_protocol_tag(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTagNames.size(); ++i)
        if (kTagNames[i] == name) return static_cast<ProtocolTag>(i);
    return std::nullopt;
}

std::string TransportPacket::meta_or(const std::string& key, const std::string& fallback) const {
    auto it = meta.find(key);
    return it == meta.end() ? fallback : it->second;
}

TransportPacket clone_classical(const TransportPacket& p) {
    TransportPacket c;
    c.sender = p.sender;
    c.receiver = p.receiver;
    c.protocol = p.protocol;
    c.sequence = p.sequence;
    c.await_ack = p.await_ack;
    c.meta = p.meta;
    std::visit(
        [&c](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, qsim::Qubit>) {
                throw InvalidMessage("cannot copy a qubit payload");
            } else {
                c.payload = v;
            }
        },
        p.payload);
    return c;
}

bool payload_matches_tag(const TransportPacket& p) {
    switch (p.protocol) {
        case ProtocolTag::SEND_CLASSICAL:
        case ProtocolTag::SEND_BROADCAST:
            return std::holds_alternative<std::string>(p.payload);
        case ProtocolTag::SEND_QUBIT:
        case ProtocolTag::SEND_EPR:
        case ProtocolTag::SEND_SUPERDENSE:
        case ProtocolTag::SEND_GHZ:
            return p.carries_qubit();
        case ProtocolTag::SEND_TELEPORT:
            return std::holds_alternative<CorrectionBits>(p.payload);
        case ProtocolTag::ACK:
        case ProtocolTag::EPR_SWAP_CONTROL:
            return std::holds_alternative<ControlRecord>(p.payload);
        case ProtocolTag::RELAY:
            return !p.carries_qubit();
    }
    return false;
}

bool operator==(const TransportPacket& a, const TransportPacket& b) {
    return a.sender == b.sender && a.receiver == b.receiver && a.protocol == b.protocol &&
           same_payload(a.payload, b.payload) && a.sequence == b.sequence && a.await_ack == b.await_ack &&
           a.meta == b.meta;
}

bool operator==(const NetworkPacket& a, const NetworkPacket& b) {
    return a.id == b.id && a.src == b.src && a.dst == b.dst && a.ttl == b.ttl && a.inner == b.inner &&
           a.route_hint == b.route_hint;
}

std::uint64_t SequenceCounter::next(const std::string& sender, const std::string& receiver) {
    std::atomic<std::uint64_t>* counter = nullptr;
    {
        std::lock_guard lock(mutex_);
        auto& slot = counters_[{sender, receiver}];
        if (!slot) slot = std::make_unique<std::atomic<std::uint64_t>>(0);
        counter = slot.get();
    }
    return counter->fetch_add(1);
}

std::string serialize(const TransportPacket& packet) {
    Writer w;
    write_transport(w, packet);
    return w.take();
}

std::string serialize(const NetworkPacket& packet) {
    Writer w;
    w.str(packet.id);
    w.str(packet.src);
    w.str(packet.dst);
    w.u32(static_cast<std::uint32_t>(packet.ttl));
    write_transport(w, packet.inner);
    w.u32(static_cast<std::uint32_t>(packet.route_hint.size()));
    for (const auto& hop : packet.route_hint) w.str(hop);
    return w.take();
}

TransportPacket deserialize_transport(std::string_view bytes) {
    Reader r(bytes);
    TransportPacket p = read_transport(r);
    if (!r.done()) throw DecodeError("trailing bytes after packet");
    return p;
}

NetworkPacket deserialize_network(std::string_view bytes) {
    Reader r(bytes);
    NetworkPacket p;
    p.id = r.str();
    p.src = r.str();
    p.dst = r.str();
    const std::uint32_t ttl = r.u32();
    if (ttl > static_cast<std::uint32_t>(INT32_MAX)) throw DecodeError("ttl out of range");
    p.ttl = static_cast<int>(ttl);
    p.inner = read_transport(r);
    const std::uint32_t hops = r.u32();
    for (std::uint32_t i = 0; i < hops; ++i) p.route_hint.push_back(r.str());
    if (!r.done()) throw DecodeError("trailing bytes after packet");
    return p;
}

}  // namespace qnetsim
