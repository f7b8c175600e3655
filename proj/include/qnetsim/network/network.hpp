#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnetsim/core/log.hpp"
#include "qnetsim/core/packet.hpp"
#include "qnetsim/core/scheduler.hpp"
#include "qnetsim/network/graph.hpp"
#include "qnetsim/qsim/backend.hpp"

namespace qnetsim {

class Host;

enum class LinkKind { both, classical, quantum };
enum class GraphKind { classical, quantum };

std::string_view to_string(LinkKind kind) noexcept;
std::string_view to_string(GraphKind kind) noexcept;
std::optional<LinkKind> parse_link_kind(std::string_view name) noexcept;
std::optional<GraphKind> parse_graph_kind(std::string_view name) noexcept;

/// Owns the simulation: backend, scheduler, the classical and quantum
/// routing graphs, and the sequential network packet queue.
///
/// Packets enter through send() at some host and are moved one hop per
/// network dequeue, `delay` virtual seconds apart. Intermediate hosts relay
/// them back into the queue; qubit-carrying packets only follow quantum
/// edges, everything else only classical edges.
class Network {
public:
    explicit Network(std::uint64_t seed = 0);
    ~Network();
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Starts the core. A non-empty `names` list reserves the only host
    /// names add_host will accept. Throws DuplicateHost on repeated names.
    void start(const std::vector<std::string>& names = {});
    /// Stops every host, drops in-flight packets and ends all tasks.
    void stop();
    bool running() const noexcept { return running_; }

    void add_host(std::shared_ptr<Host> host);
    void add_hosts(const std::vector<std::shared_ptr<Host>>& hosts);
    /// Re-reads the host's peer sets into the routing graphs.
    void update_host(const Host& host);

    std::shared_ptr<Host> host(const std::string& id) const;
    std::vector<std::string> host_ids() const;

    DiGraph graph(GraphKind kind) const;
    std::string export_graph(GraphKind kind) const;

    /// Path from source to target using the configured routing function.
    /// Throws NoRoute, or RoutingError if a custom function misbehaves.
    Path route(GraphKind kind, const std::string& source, const std::string& target);
    /// Installs a routing function; an empty one restores the default.
    void set_routing_algo(GraphKind kind, RoutingFn fn = {});

    bool use_hop_by_hop() const noexcept { return use_hop_by_hop_; }
    void set_use_hop_by_hop(bool on) noexcept { use_hop_by_hop_ = on; }
    bool use_ent_swap() const noexcept { return use_ent_swap_; }
    void set_use_ent_swap(bool on) noexcept { use_ent_swap_ = on; }
    double delay() const noexcept { return delay_; }
    void set_delay(double seconds);

    /// Turns hop-local pairs along `path` into one source/target pair stored
    /// under `id` in both end hosts' EPR stores. Existing pairs on an edge
    /// are consumed before fresh ones are made. Throws SwapFailed.
    std::string entanglement_swap_chain(const Path& path, const std::optional<std::string>& id = {});

    /// Hands `packet`, currently at host `at`, to the network queue.
    void send(NetworkPacket packet, const std::string& at);
    std::size_t in_flight() const noexcept { return queue_.size(); }

    Scheduler& scheduler() noexcept { return scheduler_; }
    const std::shared_ptr<qsim::Backend>& backend() const noexcept { return backend_; }
    EventLog& log() noexcept { return log_; }
    SequenceCounter& sequences() noexcept { return sequences_; }
    std::string new_id() { return backend_->ids().next(); }
    std::uint64_t seed() const noexcept { return seed_; }
    double now() const noexcept { return scheduler_.now(); }

    std::uint64_t counter(const std::string& name) const;
    void count(const std::string& name, std::uint64_t n = 1) { counters_[name] += n; }

    /// Observes every hop the network forwards.
    using HopTap = std::function<void(const NetworkPacket&, const std::string& from, const std::string& to)>;
    void set_hop_tap(HopTap tap) { hop_tap_ = std::move(tap); }
    /// Observes every packet entering the network at its origin.
    using SendTap = std::function<void(const NetworkPacket&)>;
    void set_send_tap(SendTap tap) { send_tap_ = std::move(tap); }

private:
    struct InFlight {
        NetworkPacket packet;
        std::string at;
    };

    void rebuild_graphs();
    void schedule_consumer();
    void consume_one();
    void forward(InFlight item);
    void fan_out(InFlight item);
    std::shared_ptr<Host> require_host(const std::string& id) const;

    std::uint64_t seed_;
    std::shared_ptr<qsim::Backend> backend_;
    Scheduler scheduler_;
    EventLog log_;
    SequenceCounter sequences_;

    bool running_ = false;
    std::set<std::string> reserved_;
    std::map<std::string, std::shared_ptr<Host>> hosts_;
    std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> peer_snapshots_;
    DiGraph classical_;
    DiGraph quantum_;
    RoutingFn classical_algo_;
    RoutingFn quantum_algo_;

    bool use_hop_by_hop_ = true;
    bool use_ent_swap_ = false;
    double delay_ = 0.0;

    std::deque<InFlight> queue_;
    bool consumer_scheduled_ = false;
    std::set<std::pair<std::string, std::string>> seen_broadcasts_;

    std::map<std::string, std::uint64_t> counters_;
    HopTap hop_tap_;
    SendTap send_tap_;
};

}  // namespace qnetsim
