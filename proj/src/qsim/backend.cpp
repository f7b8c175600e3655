#include "qnetsim/qsim/backend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "qnetsim/core/errors.hpp"

namespace qnetsim::qsim {

namespace {

constexpr double kFlush = 1e-12;

std::optional<std::size_t> find_position(const std::vector<QubitKey>& order, QubitKey q) {
    auto it = std::find(order.begin(), order.end(), q);
    if (it == order.end()) return std::nullopt;
    return static_cast<std::size_t>(it - order.begin());
}

void apply_single(std::vector<Complex>& amps, std::size_t bit, const Matrix2& m) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | stride];
        amps[i] = m[0] * a0 + m[1] * a1;
        amps[i | stride] = m[2] * a0 + m[3] * a1;
    }
}

void apply_pair(std::vector<Complex>& amps, std::size_t first, std::size_t second, const Matrix4& m) {
    const std::size_t fa = std::size_t{1} << first;
    const std::size_t fb = std::size_t{1} << second;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & fa) || (i & fb)) continue;
        // Matrix index is 2*bit(first) + bit(second).
        const std::size_t idx[4] = {i, i | fb, i | fa, i | fa | fb};
        Complex v[4];
        for (int k = 0; k < 4; ++k) v[k] = amps[idx[k]];
        for (int r = 0; r < 4; ++r) {
            Complex acc{};
            for (int c = 0; c < 4; ++c) acc += m[r * 4 + c] * v[c];
            amps[idx[r]] = acc;
        }
    }
}

double probability_of_one(const std::vector<Complex>& amps, std::size_t bit) {
    const std::size_t mask = std::size_t{1} << bit;
    double p = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (i & mask) p += std::norm(amps[i]);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

std::size_t StateSnapshot::position(QubitKey key) const {
    auto pos = find_position(qubit_order, key);
    if (!pos) throw std::out_of_range("qubit not in snapshot");
    return *pos;
}

Backend::Backend(std::uint64_t seed) : seed_(seed), streams_(seed), ids_(seed) {}

QubitKey Backend::next_key() { return next_key_++; }

Backend::RegisterPtr Backend::lookup(QubitKey q) const {
    std::lock_guard lock(index_mutex_);
    auto it = index_.find(q);
    if (it == index_.end()) throw InvalidQubit("qubit " + std::to_string(q) + " is not live");
    return it->second;
}

QubitKey Backend::create(const std::string& owner, const std::optional<std::string>& label) {
    auto reg = std::make_shared<Register>();
    std::string name = label ? *label : ids_.next();
    std::lock_guard lock(index_mutex_);
    auto slot = labels_.find({owner, name});
    if (label && slot != labels_.end() && slot->second > 0)
        throw DuplicateQubitId("qubit id '" + name + "' already live under owner '" + owner + "'");
    const QubitKey key = next_key();
    reg->order = {key};
    reg->amplitudes = {Complex{1.0}, Complex{}};
    index_.emplace(key, reg);
    meta_.emplace(key, Meta{owner, name});
    ++labels_[{owner, name}];
    return key;
}

void Backend::apply(const Gate& gate, QubitKey q) {
    if (gate.arity() != 1) throw std::invalid_argument("two-qubit gate needs a second operand");
    const Matrix2 m = gate.matrix2();
    for (;;) {
        RegisterPtr reg = lookup(q);
        std::lock_guard lock(reg->mutex);
        if (reg->retired) continue;
        auto pos = find_position(reg->order, q);
        if (!pos) continue;
        apply_single(reg->amplitudes, *pos, m);
        return;
    }
}

void Backend::apply(const Gate& gate, QubitKey q, QubitKey target) {
    if (gate.arity() != 2) throw std::invalid_argument("single-qubit gate takes one operand");
    if (q == target) throw SameQubit("two-qubit gate applied to the same qubit twice");
    const Matrix4 m = gate.matrix4();
    for (;;) {
        RegisterPtr ra = lookup(q);
        RegisterPtr rb = lookup(target);
        if (ra == rb) {
            std::lock_guard lock(ra->mutex);
            if (ra->retired) continue;
            auto pa = find_position(ra->order, q);
            auto pb = find_position(ra->order, target);
            if (!pa || !pb) continue;
            apply_pair(ra->amplitudes, *pa, *pb, m);
            return;
        }
        std::scoped_lock lock(ra->mutex, rb->mutex);
        if (ra->retired || rb->retired) continue;
        if (!find_position(ra->order, q) || !find_position(rb->order, target)) continue;

        // Tensor product: rb's qubits take the higher bit positions.
        const std::size_t na = ra->amplitudes.size();
        std::vector<Complex> merged(na * rb->amplitudes.size());
        for (std::size_t j = 0; j < rb->amplitudes.size(); ++j)
            for (std::size_t i = 0; i < na; ++i) merged[i + j * na] = ra->amplitudes[i] * rb->amplitudes[j];
        ra->amplitudes = std::move(merged);
        ra->order.insert(ra->order.end(), rb->order.begin(), rb->order.end());
        {
            std::lock_guard index_lock(index_mutex_);
            for (QubitKey k : rb->order) index_[k] = ra;
        }
        rb->retired = true;
        rb->order.clear();
        rb->amplitudes.clear();

        apply_pair(ra->amplitudes, *find_position(ra->order, q), *find_position(ra->order, target), m);
        return;
    }
}

int Backend::measure(QubitKey q, bool non_destructive) {
    const std::string who = owner(q);
    return measure_with(q, non_destructive, streams_.uniform(who));
}

int Backend::measure_with(QubitKey q, bool non_destructive, double u) {
    for (;;) {
        RegisterPtr reg = lookup(q);
        std::lock_guard lock(reg->mutex);
        if (reg->retired) continue;
        auto pos = find_position(reg->order, q);
        if (!pos) continue;

        auto& amps = reg->amplitudes;
        const std::size_t mask = std::size_t{1} << *pos;
        const double p1 = probability_of_one(amps, *pos);
        const int outcome = u < p1 ? 1 : 0;
        const double p = outcome ? p1 : 1.0 - p1;
        const double scale = p > 0.0 ? 1.0 / std::sqrt(p) : 0.0;

        if (non_destructive) {
            for (std::size_t i = 0; i < amps.size(); ++i) {
                const bool bit = (i & mask) != 0;
                if (bit != static_cast<bool>(outcome)) {
                    amps[i] = {};
                } else {
                    amps[i] *= scale;
                    if (std::abs(amps[i]) < kFlush) amps[i] = {};
                }
            }
            return outcome;
        }

        std::vector<Complex> reduced(amps.size() / 2);
        for (std::size_t j = 0; j < reduced.size(); ++j) {
            // Re-insert the measured bit at position *pos.
            const std::size_t low = j & (mask - 1);
            const std::size_t high = (j & ~(mask - 1)) << 1;
            const std::size_t i = high | low | (outcome ? mask : 0);
            Complex a = amps[i] * scale;
            if (std::abs(a) < kFlush) a = {};
            reduced[j] = a;
        }
        amps = std::move(reduced);
        reg->order.erase(reg->order.begin() + static_cast<std::ptrdiff_t>(*pos));
        if (reg->order.empty()) {
            reg->retired = true;
            amps.clear();
        }
        std::lock_guard index_lock(index_mutex_);
        index_.erase(q);
        auto meta = meta_.find(q);
        if (meta != meta_.end()) {
            release_label_locked(meta->second);
            meta_.erase(meta);
        }
        return outcome;
    }
}

void Backend::release_label_locked(const Meta& meta) {
    auto it = labels_.find({meta.owner, meta.label});
    if (it != labels_.end() && --it->second <= 0) labels_.erase(it);
}

void Backend::release(QubitKey q) noexcept {
    try {
        if (!is_live(q)) return;
        measure(q, false);
    } catch (...) {
        // Lost a race with another release of the same key.
    }
}

bool Backend::is_live(QubitKey q) const {
    std::lock_guard lock(index_mutex_);
    return index_.count(q) != 0;
}

std::string Backend::owner(QubitKey q) const {
    std::lock_guard lock(index_mutex_);
    auto it = meta_.find(q);
    if (it == meta_.end()) throw InvalidQubit("qubit " + std::to_string(q) + " is not live");
    return it->second.owner;
}

std::string Backend::label(QubitKey q) const {
    std::lock_guard lock(index_mutex_);
    auto it = meta_.find(q);
    if (it == meta_.end()) throw InvalidQubit("qubit " + std::to_string(q) + " is not live");
    return it->second.label;
}

void Backend::set_owner(QubitKey q, const std::string& owner) {
    std::lock_guard lock(index_mutex_);
    auto it = meta_.find(q);
    if (it == meta_.end()) throw InvalidQubit("qubit " + std::to_string(q) + " is not live");
    release_label_locked(it->second);
    it->second.owner = owner;
    ++labels_[{it->second.owner, it->second.label}];
}

void Backend::set_label(QubitKey q, const std::string& label) {
    std::lock_guard lock(index_mutex_);
    auto it = meta_.find(q);
    if (it == meta_.end()) throw InvalidQubit("qubit " + std::to_string(q) + " is not live");
    release_label_locked(it->second);
    it->second.label = label;
    ++labels_[{it->second.owner, it->second.label}];
}

std::size_t Backend::live_qubits() const {
    std::lock_guard lock(index_mutex_);
    return index_.size();
}

std::size_t Backend::register_count() const {
    std::lock_guard lock(index_mutex_);
    std::unordered_set<const Register*> seen;
    for (const auto& [key, reg] : index_) seen.insert(reg.get());
    return seen.size();
}

#ifdef QNETSIM_DIAGNOSTICS
StateSnapshot Backend::inspect(QubitKey q) const {
    for (;;) {
        RegisterPtr reg = lookup(q);
        std::lock_guard lock(reg->mutex);
        if (reg->retired || !find_position(reg->order, q)) continue;
        return StateSnapshot{reg->order, reg->amplitudes};
    }
}
#endif

}  // namespace qnetsim::qsim
