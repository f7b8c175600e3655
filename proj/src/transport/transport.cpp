#include "qnetsim/transport/transport.hpp"

#include "qnetsim/core/errors.hpp"
#include "qnetsim/host/host.hpp"
#include "qnetsim/network/network.hpp"

namespace qnetsim::transport {

std::string ensure_epr(Network& network, const std::string& a, const std::string& b,
                       const std::optional<std::string>& qubit_id) {
    auto host = network.host(a);
    if (!host) throw UnknownHost("unknown host " + a);
    if (!network.host(b)) throw UnknownHost("unknown host " + b);

    if (qubit_id) {
        if (host->has_epr(b, *qubit_id)) return *qubit_id;
    } else if (auto ids = host->epr_ids(b); !ids.empty()) {
        return ids.front();
    }

    const EprResult made = host->send_epr(b, qubit_id, true);
    switch (made.status) {
        case AckResult::acked:
            return made.qubit_id;
        case AckResult::no_route:
            throw NoRoute("no quantum route " + a + " -> " + b);
        default:
            throw MissingEntanglement("could not establish a pair " + a + " -> " + b + ": " +
                                      std::string(to_string(made.status)));
    }
}

CorrectionBits teleport_encode(qsim::Qubit& q, qsim::Qubit& epr_half) {
    CorrectionBits c;
    c.epr_id = epr_half.id();
    q.cnot(epr_half);
    q.h();
    c.m1 = q.measure();
    c.m2 = epr_half.measure();
    return c;
}

qsim::Qubit teleport_decode(qsim::Qubit epr_half, const CorrectionBits& c) {
    if (!epr_half.valid() || epr_half.id() != c.epr_id)
        throw MissingEntanglement("no EPR half with id " + c.epr_id);
    if (c.m2) epr_half.x();
    if (c.m1) epr_half.z();
    return epr_half;
}

bool valid_two_bits(const std::string& bits) noexcept {
    return bits.size() == 2 && (bits[0] == '0' || bits[0] == '1') && (bits[1] == '0' || bits[1] == '1');
}

void superdense_encode(const std::string& bits, qsim::Qubit& epr_half) {
    if (!valid_two_bits(bits)) throw InvalidMessage("superdense message must be two bits, got '" + bits + "'");
    if (bits[0] == '1') epr_half.z();
    if (bits[1] == '1') epr_half.x();
}

std::string superdense_decode(qsim::Qubit arrived, qsim::Qubit kept) {
    if (!arrived.valid() || !kept.valid() || arrived.id() != kept.id())
        throw MissingEntanglement("superdense halves do not share an id");
    arrived.cnot(kept);
    arrived.h();
    const int a = arrived.measure();
    const int k = kept.measure();
    return std::string{static_cast<char>('0' + a), static_cast<char>('0' + k)};
}

TransportPacket make_ack(const TransportPacket& original, const std::string& kind) {
    TransportPacket ack;
    ack.sender = original.receiver;
    ack.receiver = original.sender;
    ack.protocol = ProtocolTag::ACK;
    ControlRecord record;
    record.kind = kind;
    record.sequence = original.sequence;
    record.answers = original.protocol;
    record.ref_id = original.meta_or("qubit_id");
    ack.payload = std::move(record);
    return ack;
}

}  // namespace qnetsim::transport
