#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "qnetsim/core/packet.hpp"
#include "qnetsim/core/scheduler.hpp"
#include "qnetsim/network/network.hpp"
#include "qnetsim/qsim/qubit.hpp"

namespace qnetsim {

/// Outcome of a send. `sent` means the packet left without await_ack.
enum class AckResult { acked, sent, timeout, no_route, rejected };

std::string_view to_string(AckResult result) noexcept;

enum class MemoryKind { epr, data, total };

struct EprResult {
    std::string qubit_id;
    AckResult status = AckResult::no_route;
};

struct GhzResult {
    std::string qubit_id;
    AckResult status = AckResult::no_route;
    /// Sender's own share when distribute is false.
    qsim::Qubit local;
};

/// A named network node.
///
/// Incoming packets queue up and are processed sequentially, one poll
/// `delay` after they arrive. Packets addressed elsewhere are relayed (and
/// optionally sniffed). Protocols started with run_protocol run as
/// scheduler tasks; their blocking calls (await_ack, get_* with a wait)
/// never hold up queue processing.
///
/// Waits are in virtual seconds: negative means no limit, 0 is a probe.
class Host : public std::enable_shared_from_this<Host> {
public:
    using QubitSniffFn = std::function<void(const std::string& sender, const std::string& receiver, qsim::Qubit&)>;
    using ClassicalSniffFn =
        std::function<void(const std::string& sender, const std::string& receiver, Message& message)>;
    using Protocol = std::function<void(Host&)>;

    static constexpr double kDefaultAckTimeout = 10.0;
    static constexpr double kDefaultDelay = 0.05;

    Host(std::string host_id, Network& network);
    ~Host();
    Host(const Host&) = delete;
    Host& operator=(const Host&) = delete;

    const std::string& host_id() const noexcept { return id_; }
    Network& network() noexcept { return network_; }

    void start();
    /// Drops queued packets, resolves pending awaits as timeouts and releases
    /// every stored qubit. Classical messages are kept.
    void stop();
    bool running() const noexcept { return running_; }
    /// Queue empty and no send waiting for its acknowledgement.
    bool is_idle() const;

    void add_connection(const std::string& peer, LinkKind kind = LinkKind::both);
    void add_connections(const std::vector<std::string>& peers, LinkKind kind = LinkKind::both);
    void remove_connection(const std::string& peer, LinkKind kind = LinkKind::both);
    const std::set<std::string>& classical_peers() const noexcept { return classical_peers_; }
    const std::set<std::string>& quantum_peers() const noexcept { return quantum_peers_; }

    double ack_timeout() const noexcept { return ack_timeout_; }
    void set_ack_timeout(double seconds);
    double delay() const noexcept { return delay_; }
    void set_delay(double seconds);

    /// Throws InvalidLimit for negative n.
    void set_memory_limit(MemoryKind kind, int n);
    void clear_memory_limit(MemoryKind kind);
    std::optional<int> memory_limit(MemoryKind kind) const;

    bool q_relay_sniffing = false;
    bool c_relay_sniffing = false;
    void set_q_sniff_fn(QubitSniffFn fn) { q_sniff_fn_ = std::move(fn); }
    void set_c_sniff_fn(ClassicalSniffFn fn) { c_sniff_fn_ = std::move(fn); }

    AckResult send_classical(const std::string& receiver, const std::string& content, bool await_ack = false);
    /// Transfers q; on any result other than no_route the handle is left empty.
    AckResult send_qubit(const std::string& receiver, qsim::Qubit& q, bool await_ack = false);
    /// Creates a pair with the receiver. The local half goes into this host's
    /// EPR store under the returned id.
    EprResult send_epr(const std::string& receiver, const std::optional<std::string>& qubit_id = {},
                       bool await_ack = false);
    /// Consumes q and one EPR pair shared with the receiver, creating the
    /// pair first if none is stored.
    AckResult send_teleport(const std::string& receiver, qsim::Qubit& q, bool await_ack = false);
    /// Throws InvalidMessage unless bits is one of "00", "01", "10", "11".
    AckResult send_superdense(const std::string& receiver, const std::string& bits, bool await_ack = false);
    GhzResult send_ghz(const std::vector<std::string>& receivers, bool distribute = false, bool await_ack = false);
    void send_broadcast(const std::string& content);

    /// Messages from `sender`, newest first.
    std::vector<Message> get_classical(const std::string& sender, double wait = 0);
    /// Oldest message from `sender` not yet consumed by this call.
    std::optional<Message> get_next_classical(const std::string& sender, double wait = 0);
    /// Every stored message, newest first.
    std::vector<Message> classical() const;
    void empty_classical();

    std::optional<qsim::Qubit> get_data_qubit(const std::string& sender,
                                              const std::optional<std::string>& qubit_id = {}, double wait = 0);
    std::optional<qsim::Qubit> get_epr(const std::string& partner, const std::optional<std::string>& qubit_id = {},
                                       double wait = 0);
    std::optional<qsim::Qubit> get_ghz(const std::string& distributor, double wait = 0);

    /// Stores q as an EPR half shared with `partner`. Returns its id, or
    /// nullopt (q released) when the EPR memory is full.
    std::optional<std::string> add_epr(const std::string& partner, qsim::Qubit q,
                                       const std::optional<std::string>& qubit_id = {});

    std::size_t epr_count(const std::string& partner) const;
    std::size_t epr_count() const;
    std::size_t data_count() const;
    std::size_t ghz_count() const;
    std::vector<std::string> epr_ids(const std::string& partner) const;

    /// Fresh |0> owned by this host.
    qsim::Qubit new_qubit(const std::optional<std::string>& qubit_id = {});
    /// Draws from this host's own application random stream.
    int random_bit();
    double random_uniform();

    TaskHandle run_protocol(Protocol fn, bool blocking = false);
    template <class F, class... Args>
    TaskHandle run_protocol(F fn, std::tuple<Args...> args, bool blocking = false) {
        return run_protocol(
            Protocol([fn = std::move(fn), args = std::move(args)](Host& host) {
                std::apply([&](auto&... a) { fn(host, a...); }, args);
            }),
            blocking);
    }

    void sleep(double seconds);

    // Network-facing plumbing.
    void enqueue(NetworkPacket packet);
    std::size_t queue_size() const noexcept { return queue_.size(); }
    bool can_store(MemoryKind kind) const;
    void store_epr(const std::string& partner, qsim::Qubit q);
    std::optional<qsim::Qubit> take_epr(const std::string& partner, const std::string& qubit_id);
    bool has_epr(const std::string& partner, const std::string& qubit_id) const;
    /// Stored EPR half without removing it, or nullptr.
    const qsim::Qubit* find_epr(const std::string& partner, const std::string& qubit_id) const;

private:
    struct StoredMessage {
        Message message;
        bool consumed = false;
    };
    struct PendingAck {
        bool resolved = false;
        AckResult result = AckResult::timeout;
    };
    struct Deferred {
        NetworkPacket packet;
        double deadline;
    };
    using QubitStore = std::map<std::string, std::deque<qsim::Qubit>>;

    void require_running() const;
    std::optional<Path> plan_route(GraphKind kind, const std::string& receiver);
    NetworkPacket make_packet(const std::string& receiver, ProtocolTag tag, Payload payload, bool await_ack,
                              std::optional<Path> route);
    AckResult transmit(NetworkPacket packet);
    AckResult await(const std::string& receiver, std::uint64_t sequence);

    void drain();
    void process(NetworkPacket packet);
    void relay(NetworkPacket packet);
    void deliver(NetworkPacket packet);
    bool try_deliver_entangled(NetworkPacket& packet);
    void retry_deferred();
    void expire_deferred(const std::string& packet_id);
    void reply(const TransportPacket& original, const std::string& kind);
    void handle_control(const TransportPacket& packet);
    void store_message(Message message);

    std::optional<qsim::Qubit> take_from(QubitStore& store, const std::string& key,
                                         const std::optional<std::string>& qubit_id);
    std::optional<qsim::Qubit> wait_take(QubitStore& store, const std::string& key,
                                         const std::optional<std::string>& qubit_id, double wait);
    static std::size_t total(const QubitStore& store);
    static bool contains(const QubitStore& store, const std::string& key, const std::optional<std::string>& qubit_id);

    std::string id_;
    Network& network_;
    bool started_ = false;
    bool running_ = false;

    std::set<std::string> classical_peers_;
    std::set<std::string> quantum_peers_;

    double ack_timeout_ = kDefaultAckTimeout;
    double delay_ = kDefaultDelay;
    std::optional<int> epr_limit_;
    std::optional<int> data_limit_;
    std::optional<int> total_limit_;

    QubitSniffFn q_sniff_fn_;
    ClassicalSniffFn c_sniff_fn_;

    std::deque<NetworkPacket> queue_;
    bool drain_scheduled_ = false;
    std::vector<StoredMessage> messages_;
    QubitStore data_store_;
    QubitStore epr_store_;
    QubitStore ghz_store_;
    std::map<std::pair<std::string, std::uint64_t>, PendingAck> pending_;
    std::vector<Deferred> deferred_;
    std::size_t protocol_count_ = 0;
};

}  // namespace qnetsim
