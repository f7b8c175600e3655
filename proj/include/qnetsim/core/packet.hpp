#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qnetsim/qsim/qubit.hpp"

namespace qnetsim {

enum class ProtocolTag : std::uint8_t {
    SEND_CLASSICAL,
    SEND_QUBIT,
    SEND_EPR,
    SEND_TELEPORT,
    SEND_SUPERDENSE,
    SEND_GHZ,
    SEND_BROADCAST,
    ACK,
    EPR_SWAP_CONTROL,
    RELAY,
};

std::string_view to_string(ProtocolTag tag) noexcept;
std::optional<ProtocolTag> parse_protocol_tag(std::string_view name) noexcept;

/// Teleportation corrections: X on the receiver half if m2, then Z if m1.
struct CorrectionBits {
    int m1 = 0;
    int m2 = 0;
    std::string epr_id;

    bool operator==(const CorrectionBits&) const = default;
};

/// Control payload. ACK and NACK mirror the sequence number of the packet
/// they answer.
struct ControlRecord {
    std::string kind;
    std::uint64_t sequence = 0;
    ProtocolTag answers = ProtocolTag::SEND_CLASSICAL;
    std::string ref_id;

    bool operator==(const ControlRecord&) const = default;
};

using Payload = std::variant<std::monostate, std::string, CorrectionBits, ControlRecord, qsim::Qubit>;

struct TransportPacket {
    std::string sender;
    std::string receiver;
    ProtocolTag protocol = ProtocolTag::SEND_CLASSICAL;
    Payload payload;
    std::uint64_t sequence = 0;
    bool await_ack = false;
    std::map<std::string, std::string> meta;

    bool carries_qubit() const { return std::holds_alternative<qsim::Qubit>(payload); }
    qsim::Qubit* qubit() { return std::get_if<qsim::Qubit>(&payload); }
    std::string meta_or(const std::string& key, const std::string& fallback = {}) const;
};

/// Copy of a packet without a qubit payload. Throws InvalidMessage otherwise.
TransportPacket clone_classical(const TransportPacket& packet);

/// Payload/tag consistency check; false for e.g. SEND_SUPERDENSE without a qubit.
bool payload_matches_tag(const TransportPacket& packet);

struct NetworkPacket {
    static constexpr int kDefaultTtl = 64;

    std::string id;
    std::string src;
    std::string dst;
    int ttl = kDefaultTtl;
    TransportPacket inner;
    std::vector<std::string> route_hint;
};

/// Field-wise equality. Qubit payloads compare by backend handle.
bool operator==(const TransportPacket& a, const TransportPacket& b);
bool operator==(const NetworkPacket& a, const NetworkPacket& b);

struct Message {
    std::string sender;
    std::string content;
    std::uint64_t seq_num = 0;

    bool operator==(const Message&) const = default;
};

/// Per (sender, receiver) counters starting at 0.
class SequenceCounter {
public:
    std::uint64_t next(const std::string& sender, const std::string& receiver);

private:
    std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, std::unique_ptr<std::atomic<std::uint64_t>>> counters_;
};

/// Binary encoding of classical-payload packets: fields in declaration
/// order, big-endian integers, strings as u32 length + UTF-8 bytes.
/// Throws InvalidMessage for qubit payloads.
std::string serialize(const TransportPacket& packet);
std::string serialize(const NetworkPacket& packet);

/// Throws DecodeError on malformed or truncated input.
TransportPacket deserialize_transport(std::string_view bytes);
NetworkPacket deserialize_network(std::string_view bytes);

}  // namespace qnetsim
