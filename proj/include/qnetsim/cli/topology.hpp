#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qnetsim/network/network.hpp"

namespace qnetsim {

struct TopologyLink {
    std::string a;
    std::string b;
    LinkKind kind = LinkKind::both;
    bool bidirectional = true;
    int line = 0;
};

struct TopologySettings {
    bool use_hop_by_hop = true;
    bool use_ent_swap = false;
    double delay = 0.0;
};

/// Hosts, links and network settings. Line numbers are kept for diagnostics
/// (0 for configs built in code).
struct TopologyConfig {
    std::vector<std::string> hosts;
    std::vector<TopologyLink> links;
    TopologySettings settings;

    bool has_host(const std::string& id) const;
    /// Throws ConfigError for duplicate hosts, self-links and links to
    /// undeclared hosts.
    void validate() const;
};

/// Parses the line-oriented format:
///
///     # comment
///     [hosts]
///     Alice Bob
///     [links]
///     Alice <-> Bob            both kinds, both directions
///     Alice -> Bob quantum     one direction only
///     [settings]
///     use_hop_by_hop = false
///     use_ent_swap = true
///     delay = 0.1
///
/// Errors are ConfigError with a "line N:" prefix.
TopologyConfig parse_topology(std::string_view text);
TopologyConfig load_topology(const std::string& path);
std::string format_topology(const TopologyConfig& config);

/// Applies the settings, starts the network, creates and starts every host,
/// adds the links and registers the hosts. Returns hosts in declaration order.
std::vector<std::shared_ptr<Host>> populate(Network& network, const TopologyConfig& config);

}  // namespace qnetsim
