#pragma once

#include <optional>
#include <string>

#include "qnetsim/core/packet.hpp"
#include "qnetsim/qsim/qubit.hpp"

namespace qnetsim {
class Network;
}

namespace qnetsim::transport {

/// Returns the id of an EPR pair held by `a` with `b`, creating one (over a
/// swap chain when enabled and the route is multi-hop) only if `a` holds
/// none. Throws NoRoute or MissingEntanglement.
std::string ensure_epr(Network& network, const std::string& a, const std::string& b,
                       const std::optional<std::string>& qubit_id = {});

/// CNOT(q -> epr_half), H(q), then destructive measurements m1 = q and
/// m2 = epr_half. Both handles are consumed.
CorrectionBits teleport_encode(qsim::Qubit& q, qsim::Qubit& epr_half);

/// X if m2, then Z if m1. Throws MissingEntanglement if the half does not
/// carry c.epr_id.
qsim::Qubit teleport_decode(qsim::Qubit epr_half, const CorrectionBits& c);

bool valid_two_bits(const std::string& bits) noexcept;

/// 00 -> I, 01 -> X, 10 -> Z, 11 -> X.Z (Z first). Throws InvalidMessage.
void superdense_encode(const std::string& bits, qsim::Qubit& epr_half);

/// CNOT(arrived -> kept), H(arrived), measure both; returns
/// "<m_arrived><m_kept>". Throws MissingEntanglement on an id mismatch.
std::string superdense_decode(qsim::Qubit arrived, qsim::Qubit kept);

/// Control packet answering `original` (kind "ACK" or "NACK"), addressed
/// back to its sender. The caller assigns the packet's own sequence.
TransportPacket make_ack(const TransportPacket& original, const std::string& kind);

}  // namespace qnetsim::transport
