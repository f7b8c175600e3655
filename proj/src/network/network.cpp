#include "qnetsim/network/network.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "qnetsim/core/errors.hpp"
#include "qnetsim/host/host.hpp"

namespace qnetsim {

namespace {

std::string join(const Path& path) {
    std::string out;
    for (const auto& node : path) {
        if (!out.empty()) out += ",";
        out += node;
    }
    return out;
}

}  // namespace

std::string_view to_string(LinkKind kind) noexcept {
    switch (kind) {
        case LinkKind::both: return "both";
        case LinkKind::classical: return "classical";
        case LinkKind::quantum: return "quantum";
    }
    return "both";
}

std::string_view to_string(GraphKind kind) noexcept {
    return kind == GraphKind::classical ? "classical" : "quantum";
}

std::optional<LinkKind> parse_link_kind(std::string_view name) noexcept {
    if (name == "both") return LinkKind::both;
    if (name == "classical") return LinkKind::classical;
    if (name == "quantum") return LinkKind::quantum;
    return std::nullopt;
}

std::optional<GraphKind> parse_graph_kind(std::string_view name) noexcept {
    if (name == "classical") return GraphKind::classical;
    if (name == "quantum") return GraphKind::quantum;
    return std::nullopt;
}

Network::Network(std::uint64_t seed)
    : seed_(seed), backend_(std::make_shared<qsim::Backend>(seed)), log_([this] { return scheduler_.now(); }) {}

Network::~Network() { stop(); }

void Network::start(const std::vector<std::string>& names) {
    std::set<std::string> reserved;
    for (const auto& name : names)
        if (!reserved.insert(name).second) throw DuplicateHost("duplicate host name " + name);
    reserved_ = std::move(reserved);
    running_ = true;
    log_.info("network", "start", std::to_string(reserved_.size()) + " reserved names");
}

void Network::stop() {
    running_ = false;
    for (auto& [id, host] : hosts_) host->stop();
    queue_.clear();
    scheduler_.shutdown();
}

void Network::add_host(std::shared_ptr<Host> host) {
    if (!host) throw std::invalid_argument("null host");
    if (!running_) throw Error("network not started");
    if (&host->network() != this) throw std::invalid_argument("host belongs to another network");
    const std::string& id = host->host_id();
    if (!reserved_.empty() && !reserved_.count(id)) throw UnknownHost("host name not reserved at start: " + id);
    if (hosts_.count(id)) throw DuplicateHost("host already added: " + id);
    hosts_[id] = host;
    peer_snapshots_[id] = {host->classical_peers(), host->quantum_peers()};
    rebuild_graphs();
    log_.info("network", "add_host", id);
}

void Network::add_hosts(const std::vector<std::shared_ptr<Host>>& hosts) {
    for (const auto& h : hosts) add_host(h);
}

void Network::update_host(const Host& host) {
    auto it = hosts_.find(host.host_id());
    if (it == hosts_.end() || it->second.get() != &host) throw UnknownHost("host not in network: " + host.host_id());
    peer_snapshots_[host.host_id()] = {host.classical_peers(), host.quantum_peers()};
    rebuild_graphs();
    log_.debug("network", "update_host", host.host_id());
}

void Network::rebuild_graphs() {
    classical_.clear();
    quantum_.clear();
    for (const auto& [id, host] : hosts_) {
        auto& c = classical_[id];
        auto& q = quantum_[id];
        const auto& [cpeers, qpeers] = peer_snapshots_[id];
        for (const auto& p : cpeers)
            if (hosts_.count(p)) c[p] = 1.0;
        for (const auto& p : qpeers)
            if (hosts_.count(p)) q[p] = 1.0;
    }
}

std::shared_ptr<Host> Network::host(const std::string& id) const {
    auto it = hosts_.find(id);
    return it == hosts_.end() ? nullptr : it->second;
}

std::shared_ptr<Host> Network::require_host(const std::string& id) const {
    auto h = host(id);
    if (!h) throw UnknownHost("unknown host " + id);
    return h;
}

std::vector<std::string> Network::host_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, h] : hosts_) ids.push_back(id);
    return ids;
}

DiGraph Network::graph(GraphKind kind) const { return kind == GraphKind::classical ? classical_ : quantum_; }

std::string Network::export_graph(GraphKind kind) const {
    return to_dot(kind == GraphKind::classical ? classical_ : quantum_, to_string(kind));
}

Path Network::route(GraphKind kind, const std::string& source, const std::string& target) {
    const DiGraph& g = kind == GraphKind::classical ? classical_ : quantum_;
    if (!g.count(source)) throw NoRoute("unknown host " + source);
    if (!g.count(target)) throw NoRoute("unknown host " + target);
    count("route_computations");
    const RoutingFn& custom = kind == GraphKind::classical ? classical_algo_ : quantum_algo_;
    Path path;
    try {
        path = custom ? custom(g, source, target) : shortest_path(g, source, target);
    } catch (const NoRoute&) {
        throw;
    } catch (const std::exception& e) {
        throw RoutingError(std::string("routing function failed: ") + e.what());
    }
    if (path.empty() || path.front() != source || path.back() != target || !is_path(g, path))
        throw RoutingError("routing function returned an invalid path: " + join(path));
    log_.debug("network", "route", source + " " + target + " " + join(path));
    return path;
}

void Network::set_routing_algo(GraphKind kind, RoutingFn fn) {
    (kind == GraphKind::classical ? classical_algo_ : quantum_algo_) = std::move(fn);
}

void Network::set_delay(double seconds) {
    if (seconds < 0) throw std::invalid_argument("delay must be non-negative");
    delay_ = seconds;
}

std::uint64_t Network::counter(const std::string& name) const {
    auto it = counters_.find(name);
    return it == counters_.end() ? 0 : it->second;
}

void Network::send(NetworkPacket packet, const std::string& at) {
    if (!running_) return;
    if (at == packet.src) {
        count("packets_sent");
        if (send_tap_) send_tap_(packet);
    }
    log_.debug(at, "enqueue", std::string(to_string(packet.inner.protocol)) + " " + packet.src + "->" + packet.dst);
    queue_.push_back(InFlight{std::move(packet), at});
    schedule_consumer();
}

void Network::schedule_consumer() {
    if (consumer_scheduled_ || queue_.empty()) return;
    consumer_scheduled_ = true;
    scheduler_.post(delay_, [this] { consume_one(); });
}

void Network::consume_one() {
    consumer_scheduled_ = false;
    if (queue_.empty() || !running_) return;
    InFlight item = std::move(queue_.front());
    queue_.pop_front();
    if (item.packet.inner.protocol == ProtocolTag::SEND_BROADCAST && item.packet.dst.empty())
        fan_out(std::move(item));
    else
        forward(std::move(item));
    schedule_consumer();
}

void Network::forward(InFlight item) {
    NetworkPacket& p = item.packet;
    const GraphKind kind = p.inner.carries_qubit() ? GraphKind::quantum : GraphKind::classical;
    auto drop = [&](const std::string& why) {
        count("dropped");
        log_.info("network", "drop", std::string(to_string(p.inner.protocol)) + " " + p.src + "->" + p.dst + ": " + why);
    };

    auto target = host(p.dst);
    if (!target) return drop("unknown destination");

    std::string next;
    if (item.at == p.dst) {
        next = p.dst;
    } else if (!p.route_hint.empty()) {
        auto it = std::find(p.route_hint.begin(), p.route_hint.end(), item.at);
        if (it == p.route_hint.end() || std::next(it) == p.route_hint.end()) return drop("off pinned route");
        next = *std::next(it);
        const DiGraph& g = kind == GraphKind::classical ? classical_ : quantum_;
        if (!is_path(g, {item.at, next})) return drop("pinned edge " + item.at + "->" + next + " gone");
    } else {
        try {
            next = route(kind, item.at, p.dst).at(1);
        } catch (const Error& e) {
            return drop(e.what());
        }
    }

    count("hops");
    if (hop_tap_) hop_tap_(p, item.at, next);
    log_.debug("network", "hop", std::string(to_string(p.inner.protocol)) + " " + item.at + "->" + next);
    require_host(next)->enqueue(std::move(p));
}

void Network::fan_out(InFlight item) {
    const NetworkPacket& p = item.packet;
    for (const auto& dst : reachable_from(classical_, p.src)) {
        if (!seen_broadcasts_.insert({p.id, dst}).second) continue;
        NetworkPacket copy;
        copy.id = p.id;
        copy.src = p.src;
        copy.dst = dst;
        copy.ttl = p.ttl;
        copy.inner = clone_classical(p.inner);
        copy.inner.receiver = dst;
        copy.inner.sequence = sequences_.next(p.src, dst);
        queue_.push_back(InFlight{std::move(copy), item.at});
    }
    log_.debug("network", "broadcast", p.src + " " + p.id);
}

std::string Network::entanglement_swap_chain(const Path& path, const std::optional<std::string>& id) {
    if (path.size() < 2) throw SwapFailed("swap chain needs at least two nodes");
    std::vector<std::shared_ptr<Host>> nodes;
    for (const auto& n : path) {
        auto h = host(n);
        if (!h) throw SwapFailed("unknown host " + n);
        nodes.push_back(std::move(h));
    }
    if (!is_path(quantum_, path)) throw SwapFailed("not a quantum path: " + join(path));
    const std::string label = id ? *id : new_id();
    const std::size_t k = path.size() - 1;
    const std::string& source = path.front();
    const std::string& target = path.back();

    // Edges that already hold a pair with matching ids on both sides.
    std::vector<std::optional<std::string>> stored(k);
    if (k > 1) {
        for (std::size_t i = 0; i < k; ++i)
            for (const auto& pid : nodes[i]->epr_ids(path[i + 1]))
                if (nodes[i + 1]->has_epr(path[i], pid)) {
                    stored[i] = pid;
                    break;
                }
    }
    if (!stored.front() && !nodes.front()->can_store(MemoryKind::epr))
        throw SwapFailed("EPR memory full at " + source);
    if (!stored.back() && !nodes.back()->can_store(MemoryKind::epr))
        throw SwapFailed("EPR memory full at " + target);

    std::vector<qsim::Qubit> left(k), right(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (stored[i]) {
            left[i] = std::move(*nodes[i]->take_epr(path[i + 1], *stored[i]));
            right[i] = std::move(*nodes[i + 1]->take_epr(path[i], *stored[i]));
        } else {
            auto [a, b] = qsim::make_epr(backend_, path[i], path[i + 1]);
            count("epr_created");
            left[i] = std::move(a);
            right[i] = std::move(b);
        }
    }

    int xacc = 0;
    int zacc = 0;
    for (std::size_t j = 1; j < k; ++j) {
        qsim::Qubit& l = right[j - 1];
        qsim::Qubit& r = left[j];
        l.cnot(r);
        l.h();
        const int z = l.measure();
        const int x = r.measure();
        xacc ^= x;
        zacc ^= z;
        log_.debug(path[j], to_string(ProtocolTag::EPR_SWAP_CONTROL),
                   "bell " + std::to_string(z) + std::to_string(x) + " -> " + target);
    }

    qsim::Qubit& head = left.front();
    qsim::Qubit& tail = right.back();
    if (xacc) tail.x();
    if (zacc) tail.z();
    head.set_id(label);
    tail.set_id(label);
    head.set_owner(source);
    tail.set_owner(target);
    nodes.front()->store_epr(target, std::move(head));
    nodes.back()->store_epr(source, std::move(tail));
    count("swap_chains");
    log_.info("network", "swap_chain", join(path) + " id=" + label);
    return label;
}

}  // namespace qnetsim
