#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qnetsim/core/packet.hpp"

namespace qnetsim::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kScenarioFailed = 1;
inline constexpr int kUsage = 2;

/// Runs the command line `args` (without the program name).
///
///     run    --scenario NAME [--seed N] [--topology FILE] [--out FILE]
///            [--transcript FILE] [--record FILE] [--log-level LEVEL]
///     graph  (--topology FILE | --scenario NAME) [--kind classical|quantum] [--out FILE]
///     replay FILE
///     list
///
/// --seed falls back to QNETSIM_SEED, then 0.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One recorded hop.
struct HopRecord {
    std::string from;
    std::string to;
    NetworkPacket packet;
};

/// Qubit payloads are dropped (the tag says what was carried).
std::string encode_hop(const NetworkPacket& packet, const std::string& from, const std::string& to);
/// Throws DecodeError on malformed input.
std::vector<HopRecord> decode_hops(const std::string& bytes);
std::string describe(const HopRecord& hop);

}  // namespace qnetsim::cli
