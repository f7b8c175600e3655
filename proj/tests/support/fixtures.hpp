#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qnetsim/host/host.hpp"
#include "qnetsim/network/network.hpp"

namespace fixtures {

using qnetsim::LinkKind;

struct Link {
    std::string a;
    std::string b;
    LinkKind kind = LinkKind::both;
};

/// Started network with bidirectional links; hosts in declaration order.
struct Net {
    explicit Net(std::uint64_t seed = 1) : net(std::make_unique<qnetsim::Network>(seed)) {}

    void build(const std::vector<std::string>& names, const std::vector<Link>& links) {
        net->start();
        for (const auto& n : names) {
            auto h = std::make_shared<qnetsim::Host>(n, *net);
            h->start();
            hosts.push_back(h);
        }
        auto find = [this](const std::string& id) -> qnetsim::Host& {
            for (auto& h : hosts)
                if (h->host_id() == id) return *h;
            throw std::invalid_argument("no host " + id);
        };
        for (const auto& l : links) {
            find(l.a).add_connection(l.b, l.kind);
            find(l.b).add_connection(l.a, l.kind);
        }
        net->add_hosts(hosts);
    }

    qnetsim::Host& operator[](const std::string& id) { return *net->host(id); }
    qnetsim::Network& operator*() { return *net; }
    qnetsim::Network* operator->() { return net.get(); }

    std::unique_ptr<qnetsim::Network> net;
    std::vector<std::shared_ptr<qnetsim::Host>> hosts;
};

inline std::vector<Link> chain(const std::vector<std::string>& names, LinkKind kind = LinkKind::both) {
    std::vector<Link> out;
    for (std::size_t i = 0; i + 1 < names.size(); ++i) out.push_back({names[i], names[i + 1], kind});
    return out;
}

}  // namespace fixtures
