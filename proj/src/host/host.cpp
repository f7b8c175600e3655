#include "qnetsim/host/host.hpp"

#include <algorithm>
#include <stdexcept>

#include "qnetsim/core/errors.hpp"
#include "qnetsim/transport/transport.hpp"

namespace qnetsim {

std::string_view to_string(AckResult result) noexcept {
    switch (result) {
        case AckResult::acked: return "acked";
        case AckResult::sent: return "sent";
        case AckResult::timeout: return "timeout";
        case AckResult::no_route: return "no_route";
        case AckResult::rejected: return "rejected";
    }
    return "timeout";
}

Host::Host(std::string host_id, Network& network) : id_(std::move(host_id)), network_(network) {
    if (id_.empty()) throw std::invalid_argument("host id must not be empty");
}

Host::~Host() = default;

void Host::start() {
    if (started_) throw AlreadyStarted("host " + id_ + " already started");
    started_ = true;
    running_ = true;
    network_.log().debug(id_, "start", "");
}

void Host::stop() {
    if (!running_) return;
    running_ = false;
    queue_.clear();
    deferred_.clear();
    data_store_.clear();
    epr_store_.clear();
    ghz_store_.clear();
    for (auto& [key, pending] : pending_) {
        pending.resolved = true;
        pending.result = AckResult::timeout;
    }
    network_.log().debug(id_, "stop", "");
}

bool Host::is_idle() const { return queue_.empty() && !drain_scheduled_ && pending_.empty(); }

void Host::require_running() const {
    if (!running_) throw HostStopped("host " + id_ + " is not running");
}

void Host::add_connection(const std::string& peer, LinkKind kind) {
    if (peer == id_) throw SelfLink("host " + id_ + " cannot connect to itself");
    if (kind != LinkKind::quantum) classical_peers_.insert(peer);
    if (kind != LinkKind::classical) quantum_peers_.insert(peer);
}

void Host::add_connections(const std::vector<std::string>& peers, LinkKind kind) {
    for (const auto& p : peers) add_connection(p, kind);
}

void Host::remove_connection(const std::string& peer, LinkKind kind) {
    if (kind != LinkKind::quantum) classical_peers_.erase(peer);
    if (kind != LinkKind::classical) quantum_peers_.erase(peer);
}

void Host::set_ack_timeout(double seconds) {
    if (seconds < 0) throw std::invalid_argument("ack timeout must be non-negative");
    ack_timeout_ = seconds;
}

void Host::set_delay(double seconds) {
    if (seconds < 0) throw std::invalid_argument("delay must be non-negative");
    delay_ = seconds;
}

void Host::set_memory_limit(MemoryKind kind, int n) {
    if (n < 0) throw InvalidLimit("memory limit must be non-negative, got " + std::to_string(n));
    switch (kind) {
        case MemoryKind::epr: epr_limit_ = n; break;
        case MemoryKind::data: data_limit_ = n; break;
        case MemoryKind::total: total_limit_ = n; break;
    }
}

void Host::clear_memory_limit(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::epr: epr_limit_.reset(); break;
        case MemoryKind::data: data_limit_.reset(); break;
        case MemoryKind::total: total_limit_.reset(); break;
    }
}

std::optional<int> Host::memory_limit(MemoryKind kind) const {
    switch (kind) {
        case MemoryKind::epr: return epr_limit_;
        case MemoryKind::data: return data_limit_;
        case MemoryKind::total: return total_limit_;
    }
    return std::nullopt;
}

std::size_t Host::total(const QubitStore& store) {
    std::size_t n = 0;
    for (const auto& [key, list] : store) n += list.size();
    return n;
}

bool Host::can_store(MemoryKind kind) const {
    const std::size_t e = total(epr_store_);
    const std::size_t d = total(data_store_);
    const std::size_t g = total(ghz_store_);
    if (total_limit_ && e + d + g >= static_cast<std::size_t>(*total_limit_)) return false;
    if (kind == MemoryKind::epr && epr_limit_ && e >= static_cast<std::size_t>(*epr_limit_)) return false;
    if (kind == MemoryKind::data && data_limit_ && d >= static_cast<std::size_t>(*data_limit_)) return false;
    return true;
}

std::size_t Host::epr_count(const std::string& partner) const {
    auto it = epr_store_.find(partner);
    return it == epr_store_.end() ? 0 : it->second.size();
}

std::size_t Host::epr_count() const { return total(epr_store_); }
std::size_t Host::data_count() const { return total(data_store_); }
std::size_t Host::ghz_count() const { return total(ghz_store_); }

std::vector<std::string> Host::epr_ids(const std::string& partner) const {
    std::vector<std::string> ids;
    auto it = epr_store_.find(partner);
    if (it != epr_store_.end())
        for (const auto& q : it->second) ids.push_back(q.id());
    return ids;
}

bool Host::contains(const QubitStore& store, const std::string& key, const std::optional<std::string>& qubit_id) {
    auto it = store.find(key);
    if (it == store.end() || it->second.empty()) return false;
    if (!qubit_id) return true;
    return std::any_of(it->second.begin(), it->second.end(), [&](const qsim::Qubit& q) { return q.id() == *qubit_id; });
}

std::optional<qsim::Qubit> Host::take_from(QubitStore& store, const std::string& key,
                                           const std::optional<std::string>& qubit_id) {
    auto it = store.find(key);
    if (it == store.end()) return std::nullopt;
    auto& list = it->second;
    auto pos = list.begin();
    if (qubit_id) pos = std::find_if(list.begin(), list.end(), [&](const qsim::Qubit& q) { return q.id() == *qubit_id; });
    if (pos == list.end()) return std::nullopt;
    qsim::Qubit q = std::move(*pos);
    list.erase(pos);
    if (list.empty()) store.erase(it);
    return q;
}

std::optional<qsim::Qubit> Host::wait_take(QubitStore& store, const std::string& key,
                                           const std::optional<std::string>& qubit_id, double wait) {
    if (wait != 0 && !contains(store, key, qubit_id))
        network_.scheduler().wait_until([&] { return contains(store, key, qubit_id); }, wait);
    return take_from(store, key, qubit_id);
}

void Host::store_epr(const std::string& partner, qsim::Qubit q) {
    q.set_owner(id_);
    epr_store_[partner].push_back(std::move(q));
    retry_deferred();
}

std::optional<qsim::Qubit> Host::take_epr(const std::string& partner, const std::string& qubit_id) {
    return take_from(epr_store_, partner, qubit_id);
}

bool Host::has_epr(const std::string& partner, const std::string& qubit_id) const {
    return contains(epr_store_, partner, qubit_id);
}

const qsim::Qubit* Host::find_epr(const std::string& partner, const std::string& qubit_id) const {
    auto it = epr_store_.find(partner);
    if (it == epr_store_.end()) return nullptr;
    for (const auto& q : it->second)
        if (q.id() == qubit_id) return &q;
    return nullptr;
}

qsim::Qubit Host::new_qubit(const std::optional<std::string>& qubit_id) {
    return qsim::Qubit::create(network_.backend(), id_, qubit_id);
}

int Host::random_bit() { return network_.backend()->streams().bit("app/" + id_); }
double Host::random_uniform() { return network_.backend()->streams().uniform("app/" + id_); }

TaskHandle Host::run_protocol(Protocol fn, bool blocking) {
    require_running();
    auto self = shared_from_this();
    const std::string name = id_ + "/protocol" + std::to_string(protocol_count_++);
    TaskHandle handle = network_.scheduler().spawn(name, [self, fn = std::move(fn)] { fn(*self); });
    if (blocking) handle.wait();
    return handle;
}

void Host::sleep(double seconds) { network_.scheduler().sleep(seconds); }

// ---------------------------------------------------------------------------
// Sending

std::optional<Path> Host::plan_route(GraphKind kind, const std::string& receiver) {
    try {
        return network_.route(kind, id_, receiver);
    } catch (const NoRoute& e) {
        network_.log().info(id_, "no_route", std::string(to_string(kind)) + " " + receiver + ": " + e.what());
    } catch (const RoutingError& e) {
        network_.log().warn(id_, "routing_error", e.what());
    }
    return std::nullopt;
}

NetworkPacket Host::make_packet(const std::string& receiver, ProtocolTag tag, Payload payload, bool await_ack,
                                std::optional<Path> route) {
    NetworkPacket p;
    p.id = network_.new_id();
    p.src = id_;
    p.dst = receiver;
    p.inner.sender = id_;
    p.inner.receiver = receiver;
    p.inner.protocol = tag;
    p.inner.payload = std::move(payload);
    p.inner.sequence = network_.sequences().next(id_, receiver);
    p.inner.await_ack = await_ack;
    if (route && !network_.use_hop_by_hop()) p.route_hint = std::move(*route);
    return p;
}

AckResult Host::transmit(NetworkPacket packet) {
    const bool await_ack = packet.inner.await_ack;
    const std::string receiver = packet.dst;
    const std::uint64_t seq = packet.inner.sequence;
    network_.log().info(id_, "send", std::string(to_string(packet.inner.protocol)) + " to " + receiver +
                                         " seq=" + std::to_string(seq));
    if (await_ack) pending_[{receiver, seq}];
    network_.send(std::move(packet), id_);
    return await_ack ? await(receiver, seq) : AckResult::sent;
}

AckResult Host::await(const std::string& receiver, std::uint64_t sequence) {
    const auto key = std::make_pair(receiver, sequence);
    auto it = pending_.find(key);
    if (it == pending_.end()) return AckResult::timeout;
    PendingAck& entry = it->second;
    try {
        if (!entry.resolved) network_.scheduler().wait_until([&entry] { return entry.resolved; }, ack_timeout_);
    } catch (...) {
        pending_.erase(key);
        throw;
    }
    const AckResult result = entry.resolved ? entry.result : AckResult::timeout;
    pending_.erase(key);
    if (result != AckResult::acked)
        network_.log().info(id_, "await", receiver + " seq=" + std::to_string(sequence) + " " +
                                              std::string(to_string(result)));
    return result;
}

AckResult Host::send_classical(const std::string& receiver, const std::string& content, bool await_ack) {
    require_running();
    auto route = plan_route(GraphKind::classical, receiver);
    if (!route) return AckResult::no_route;
    return transmit(make_packet(receiver, ProtocolTag::SEND_CLASSICAL, content, await_ack, std::move(route)));
}

AckResult Host::send_qubit(const std::string& receiver, qsim::Qubit& q, bool await_ack) {
    require_running();
    if (!q.valid()) throw InvalidQubit("send_qubit with an invalid qubit");
    if (q.owner() != id_) throw NotOwner("qubit is owned by " + q.owner() + ", not " + id_);
    auto route = plan_route(GraphKind::quantum, receiver);
    if (!route) return AckResult::no_route;
    const std::string qid = q.id();
    NetworkPacket p = make_packet(receiver, ProtocolTag::SEND_QUBIT, std::move(q), await_ack, std::move(route));
    p.inner.meta["qubit_id"] = qid;
    return transmit(std::move(p));
}

EprResult Host::send_epr(const std::string& receiver, const std::optional<std::string>& qubit_id, bool await_ack) {
    require_running();
    EprResult result;
    result.qubit_id = qubit_id ? *qubit_id : network_.new_id();
    auto route = plan_route(GraphKind::quantum, receiver);
    if (!route) {
        result.status = AckResult::no_route;
        return result;
    }

    if (route->size() > 2 && network_.use_ent_swap()) {
        try {
            network_.entanglement_swap_chain(*route, result.qubit_id);
            result.status = AckResult::acked;
        } catch (const SwapFailed& e) {
            network_.log().info(id_, "swap_failed", e.what());
            result.status = AckResult::rejected;
        }
        return result;
    }

    if (!can_store(MemoryKind::epr)) {
        result.status = AckResult::rejected;
        return result;
    }
    auto [mine, theirs] = qsim::make_epr(network_.backend(), id_, id_, result.qubit_id);
    network_.count("epr_created");
    store_epr(receiver, std::move(mine));
    NetworkPacket p = make_packet(receiver, ProtocolTag::SEND_EPR, std::move(theirs), await_ack, std::move(route));
    p.inner.meta["qubit_id"] = result.qubit_id;
    result.status = transmit(std::move(p));
    return result;
}

AckResult Host::send_teleport(const std::string& receiver, qsim::Qubit& q, bool await_ack) {
    require_running();
    if (!q.valid()) throw InvalidQubit("send_teleport with an invalid qubit");
    if (q.owner() != id_) throw NotOwner("qubit is owned by " + q.owner() + ", not " + id_);
    auto route = plan_route(GraphKind::classical, receiver);
    if (!route) return AckResult::no_route;

    std::string epr_id;
    if (auto ids = epr_ids(receiver); !ids.empty()) {
        epr_id = ids.front();
    } else {
        const EprResult made = send_epr(receiver, std::nullopt, true);
        if (made.status != AckResult::acked) return made.status;
        epr_id = made.qubit_id;
    }
    auto half = take_epr(receiver, epr_id);
    if (!half) throw MissingEntanglement("EPR half " + epr_id + " vanished before teleport");

    const std::string qid = q.id();
    CorrectionBits bits = transport::teleport_encode(q, *half);
    network_.log().debug(id_, "teleport", receiver + " m1=" + std::to_string(bits.m1) + " m2=" + std::to_string(bits.m2));
    NetworkPacket p = make_packet(receiver, ProtocolTag::SEND_TELEPORT, std::move(bits), await_ack, std::move(route));
    p.inner.meta["qubit_id"] = qid;
    p.inner.meta["epr_id"] = epr_id;
    return transmit(std::move(p));
}

AckResult Host::send_superdense(const std::string& receiver, const std::string& bits, bool await_ack) {
    if (!transport::valid_two_bits(bits)) throw InvalidMessage("superdense message must be two bits, got '" + bits + "'");
    require_running();
    if (!plan_route(GraphKind::quantum, receiver)) return AckResult::no_route;

    std::string epr_id;
    if (auto ids = epr_ids(receiver); !ids.empty()) {
        epr_id = ids.front();
    } else {
        const EprResult made = send_epr(receiver, std::nullopt, true);
        if (made.status != AckResult::acked) return made.status;
        epr_id = made.qubit_id;
    }
    auto half = take_epr(receiver, epr_id);
    if (!half) throw MissingEntanglement("EPR half " + epr_id + " vanished before superdense coding");
    transport::superdense_encode(bits, *half);

    // Route the carrier after the pair exists: entanglement-aware routing
    // sees the store as it is now.
    auto route = plan_route(GraphKind::quantum, receiver);
    if (!route) return AckResult::no_route;
    NetworkPacket p = make_packet(receiver, ProtocolTag::SEND_SUPERDENSE, std::move(*half), await_ack, std::move(route));
    p.inner.meta["qubit_id"] = epr_id;
    return transmit(std::move(p));
}

GhzResult Host::send_ghz(const std::vector<std::string>& receivers, bool distribute, bool await_ack) {
    require_running();
    if (receivers.empty()) throw std::invalid_argument("send_ghz needs at least one receiver");
    GhzResult result;
    std::vector<std::optional<Path>> routes;
    for (const auto& r : receivers) {
        routes.push_back(plan_route(GraphKind::quantum, r));
        if (!routes.back()) {
            result.status = AckResult::no_route;
            return result;
        }
    }
    result.qubit_id = network_.new_id();
    const std::size_t n = receivers.size() + (distribute ? 0 : 1);
    std::vector<qsim::Qubit> shares = qsim::make_ghz(network_.backend(), std::vector<std::string>(n, id_), result.qubit_id);
    std::size_t next = 0;
    if (!distribute) result.local = std::move(shares[next++]);

    std::vector<std::pair<std::string, std::uint64_t>> awaiting;
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        NetworkPacket p =
            make_packet(receivers[i], ProtocolTag::SEND_GHZ, std::move(shares[next++]), await_ack, std::move(routes[i]));
        p.inner.meta["qubit_id"] = result.qubit_id;
        p.inner.meta["distribute"] = distribute ? "1" : "0";
        if (await_ack) {
            awaiting.emplace_back(receivers[i], p.inner.sequence);
            pending_[awaiting.back()];
        }
        network_.log().info(id_, "send", "SEND_GHZ to " + receivers[i]);
        network_.send(std::move(p), id_);
    }
    if (!await_ack) {
        result.status = AckResult::sent;
        return result;
    }
    result.status = AckResult::acked;
    for (const auto& [r, seq] : awaiting) {
        const AckResult one = await(r, seq);
        if (one == AckResult::rejected || (one == AckResult::timeout && result.status == AckResult::acked))
            result.status = one;
    }
    return result;
}

void Host::send_broadcast(const std::string& content) {
    require_running();
    NetworkPacket p;
    p.id = network_.new_id();
    p.src = id_;
    p.inner.sender = id_;
    p.inner.protocol = ProtocolTag::SEND_BROADCAST;
    p.inner.payload = content;
    network_.log().info(id_, "send", "SEND_BROADCAST");
    network_.send(std::move(p), id_);
}

// ---------------------------------------------------------------------------
// Retrieval

std::vector<Message> Host::get_classical(const std::string& sender, double wait) {
    auto any = [this, &sender] {
        return std::any_of(messages_.begin(), messages_.end(),
                           [&](const StoredMessage& m) { return m.message.sender == sender; });
    };
    if (wait != 0 && !any()) network_.scheduler().wait_until(any, wait);
    std::vector<Message> out;
    for (auto it = messages_.rbegin(); it != messages_.rend(); ++it)
        if (it->message.sender == sender) out.push_back(it->message);
    std::stable_sort(out.begin(), out.end(), [](const Message& a, const Message& b) { return a.seq_num > b.seq_num; });
    return out;
}

std::optional<Message> Host::get_next_classical(const std::string& sender, double wait) {
    auto find = [this, &sender]() -> StoredMessage* {
        StoredMessage* best = nullptr;
        for (auto& m : messages_)
            if (!m.consumed && m.message.sender == sender && (!best || m.message.seq_num < best->message.seq_num))
                best = &m;
        return best;
    };
    if (wait != 0 && !find()) network_.scheduler().wait_until([&] { return find() != nullptr; }, wait);
    StoredMessage* m = find();
    if (!m) return std::nullopt;
    m->consumed = true;
    return m->message;
}

std::vector<Message> Host::classical() const {
    std::vector<Message> out;
    for (auto it = messages_.rbegin(); it != messages_.rend(); ++it) out.push_back(it->message);
    return out;
}

void Host::empty_classical() { messages_.clear(); }

std::optional<qsim::Qubit> Host::get_data_qubit(const std::string& sender, const std::optional<std::string>& qubit_id,
                                                double wait) {
    return wait_take(data_store_, sender, qubit_id, wait);
}

std::optional<qsim::Qubit> Host::get_epr(const std::string& partner, const std::optional<std::string>& qubit_id,
                                         double wait) {
    return wait_take(epr_store_, partner, qubit_id, wait);
}

std::optional<qsim::Qubit> Host::get_ghz(const std::string& distributor, double wait) {
    return wait_take(ghz_store_, distributor, std::nullopt, wait);
}

std::optional<std::string> Host::add_epr(const std::string& partner, qsim::Qubit q,
                                         const std::optional<std::string>& qubit_id) {
    if (!q.valid()) throw InvalidQubit("add_epr with an invalid qubit");
    if (q.owner() != id_) throw NotOwner("qubit is owned by " + q.owner() + ", not " + id_);
    if (!can_store(MemoryKind::epr)) {
        network_.log().info(id_, "reject", "add_epr " + partner + ": memory full");
        q.release();
        return std::nullopt;
    }
    if (qubit_id) q.set_id(*qubit_id);
    std::string label = q.id();
    store_epr(partner, std::move(q));
    return label;
}

// ---------------------------------------------------------------------------
// Queue processing

void Host::enqueue(NetworkPacket packet) {
    if (!running_) {
        network_.log().info(id_, "drop", std::string(to_string(packet.inner.protocol)) + ": host stopped");
        return;
    }
    network_.log().debug(id_, "enqueue", std::string(to_string(packet.inner.protocol)) + " " + packet.src + "->" +
                                             packet.dst);
    queue_.push_back(std::move(packet));
    if (drain_scheduled_) return;
    drain_scheduled_ = true;
    network_.scheduler().post(delay_, [self = shared_from_this()] { self->drain(); });
}

void Host::drain() {
    drain_scheduled_ = false;
    while (running_ && !queue_.empty()) {
        NetworkPacket p = std::move(queue_.front());
        queue_.pop_front();
        network_.log().debug(id_, "dequeue", std::string(to_string(p.inner.protocol)) + " " + p.src + "->" + p.dst);
        process(std::move(p));
    }
}

void Host::process(NetworkPacket packet) {
    if (packet.dst == id_)
        deliver(std::move(packet));
    else
        relay(std::move(packet));
}

void Host::relay(NetworkPacket p) {
    TransportPacket& t = p.inner;
    try {
        if (qsim::Qubit* q = t.qubit()) {
            if (q->valid()) q->set_owner(id_);
            if (q_relay_sniffing && q_sniff_fn_ && q->valid()) q_sniff_fn_(t.sender, t.receiver, *q);
        } else if (c_relay_sniffing && c_sniff_fn_ &&
                   (t.protocol == ProtocolTag::SEND_CLASSICAL || t.protocol == ProtocolTag::SEND_BROADCAST)) {
            if (auto* content = std::get_if<std::string>(&t.payload)) {
                Message m{t.sender, *content, t.sequence};
                c_sniff_fn_(t.sender, t.receiver, m);
                *content = std::move(m.content);
            }
        }
    } catch (const std::exception& e) {
        network_.log().warn(id_, "sniff_error", e.what());
    }
    if (--p.ttl <= 0) {
        network_.count("dropped");
        network_.log().info(id_, "drop", std::string(to_string(t.protocol)) + " ttl exhausted");
        return;
    }
    network_.log().debug(id_, "relay", std::string(to_string(t.protocol)) + " " + p.src + "->" + p.dst);
    network_.send(std::move(p), id_);
}

void Host::store_message(Message message) { messages_.push_back(StoredMessage{std::move(message), false}); }

void Host::deliver(NetworkPacket packet) {
    TransportPacket& t = packet.inner;
    network_.log().info(id_, "recv", std::string(to_string(t.protocol)) + " from " + t.sender + " seq=" +
                                         std::to_string(t.sequence));
    auto reject = [&](const std::string& why) {
        network_.count("rejections");
        network_.log().info(id_, "reject", std::string(to_string(t.protocol)) + " from " + t.sender + ": " + why);
        if (qsim::Qubit* q = t.qubit()) q->release();
        reply(t, "NACK");
    };

    switch (t.protocol) {
        case ProtocolTag::SEND_CLASSICAL:
        case ProtocolTag::SEND_BROADCAST: {
            auto* content = std::get_if<std::string>(&t.payload);
            if (!content) return reject("malformed payload");
            store_message(Message{t.sender, *content, t.sequence});
            if (t.protocol == ProtocolTag::SEND_CLASSICAL && t.await_ack) reply(t, "ACK");
            return;
        }
        case ProtocolTag::SEND_QUBIT:
        case ProtocolTag::SEND_EPR:
        case ProtocolTag::SEND_GHZ: {
            qsim::Qubit* q = t.qubit();
            if (!q || !q->valid()) return reject("qubit lost in transit");
            const MemoryKind kind = t.protocol == ProtocolTag::SEND_QUBIT ? MemoryKind::data
                                    : t.protocol == ProtocolTag::SEND_EPR ? MemoryKind::epr
                                                                          : MemoryKind::total;
            if (!can_store(kind)) return reject("memory full");
            q->set_owner(id_);
            if (t.protocol == ProtocolTag::SEND_QUBIT)
                data_store_[t.sender].push_back(std::move(*q));
            else if (t.protocol == ProtocolTag::SEND_GHZ)
                ghz_store_[t.sender].push_back(std::move(*q));
            else
                store_epr(t.sender, std::move(*q));
            if (t.await_ack) reply(t, "ACK");
            return;
        }
        case ProtocolTag::SEND_TELEPORT:
        case ProtocolTag::SEND_SUPERDENSE: {
            if (t.protocol == ProtocolTag::SEND_SUPERDENSE && (!t.qubit() || !t.qubit()->valid()))
                return reject("qubit lost in transit");
            if (try_deliver_entangled(packet)) return;
            const std::string pid = packet.id;
            network_.log().debug(id_, "defer", std::string(to_string(t.protocol)) + " waiting for EPR half");
            deferred_.push_back(Deferred{std::move(packet), network_.now() + ack_timeout_});
            network_.scheduler().post(ack_timeout_, [self = shared_from_this(), pid] { self->expire_deferred(pid); });
            return;
        }
        case ProtocolTag::ACK:
            handle_control(t);
            return;
        case ProtocolTag::EPR_SWAP_CONTROL:
        case ProtocolTag::RELAY:
            network_.log().debug(id_, "control", std::string(to_string(t.protocol)) + " from " + t.sender);
            return;
    }
}

bool Host::try_deliver_entangled(NetworkPacket& packet) {
    TransportPacket& t = packet.inner;
    if (t.protocol == ProtocolTag::SEND_TELEPORT) {
        const auto* c = std::get_if<CorrectionBits>(&t.payload);
        if (!c) {
            reply(t, "NACK");
            return true;
        }
        if (!has_epr(t.sender, c->epr_id)) return false;
        auto half = take_epr(t.sender, c->epr_id);
        if (data_limit_ && data_count() >= static_cast<std::size_t>(*data_limit_)) {
            network_.count("rejections");
            half->release();
            reply(t, "NACK");
            return true;
        }
        qsim::Qubit q = transport::teleport_decode(std::move(*half), *c);
        if (auto qid = t.meta_or("qubit_id"); !qid.empty()) q.set_id(qid);
        q.set_owner(id_);
        data_store_[t.sender].push_back(std::move(q));
        if (t.await_ack) reply(t, "ACK");
        return true;
    }

    const std::string epr_id = t.meta_or("qubit_id");
    if (!has_epr(t.sender, epr_id)) return false;
    auto kept = take_epr(t.sender, epr_id);
    qsim::Qubit arrived = std::move(*t.qubit());
    arrived.set_owner(id_);
    const std::string bits = transport::superdense_decode(std::move(arrived), std::move(*kept));
    store_message(Message{t.sender, bits, t.sequence});
    if (t.await_ack) reply(t, "ACK");
    return true;
}

void Host::retry_deferred() {
    if (deferred_.empty()) return;
    for (auto it = deferred_.begin(); it != deferred_.end();) {
        if (try_deliver_entangled(it->packet))
            it = deferred_.erase(it);
        else
            ++it;
    }
}

void Host::expire_deferred(const std::string& packet_id) {
    auto it = std::find_if(deferred_.begin(), deferred_.end(),
                           [&](const Deferred& d) { return d.packet.id == packet_id; });
    if (it == deferred_.end()) return;
    Deferred d = std::move(*it);
    deferred_.erase(it);
    network_.count("rejections");
    network_.log().info(id_, "reject", std::string(to_string(d.packet.inner.protocol)) + " from " +
                                           d.packet.inner.sender + ": EPR half never arrived");
    reply(d.packet.inner, "NACK");
}

void Host::reply(const TransportPacket& original, const std::string& kind) {
    if (!running_) return;
    TransportPacket t = transport::make_ack(original, kind);
    t.sequence = network_.sequences().next(id_, original.sender);
    NetworkPacket p;
    p.id = network_.new_id();
    p.src = id_;
    p.dst = original.sender;
    p.inner = std::move(t);
    if (!network_.use_hop_by_hop()) {
        auto route = plan_route(GraphKind::classical, original.sender);
        if (!route) return;
        p.route_hint = std::move(*route);
    }
    network_.count(kind == "ACK" ? "ack_packets" : "nack_packets");
    network_.log().debug(id_, kind == "ACK" ? "ack" : "nack",
                         original.sender + " seq=" + std::to_string(original.sequence));
    network_.send(std::move(p), id_);
}

void Host::handle_control(const TransportPacket& packet) {
    const auto* record = std::get_if<ControlRecord>(&packet.payload);
    if (!record) return;
    if (record->kind == "NACK" && record->answers == ProtocolTag::SEND_EPR) {
        if (auto half = take_epr(packet.sender, record->ref_id)) half->release();
    }
    auto it = pending_.find({packet.sender, record->sequence});
    if (it == pending_.end() || it->second.resolved) {
        network_.log().debug(id_, "late_ack", packet.sender + " seq=" + std::to_string(record->sequence));
        return;
    }
    it->second.resolved = true;
    it->second.result = record->kind == "ACK" ? AckResult::acked : AckResult::rejected;
}

}  // namespace qnetsim
