#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qnetsim/core/random.hpp"
#include "qnetsim/qsim/gate.hpp"

namespace qnetsim::qsim {

/// Internal handle of one simulated qubit. Unique for the backend's lifetime;
/// never reused.
using QubitKey = std::uint64_t;

/// Copy of one register: qubit_order[i] occupies bit i (little-endian) of the
/// amplitude index.
struct StateSnapshot {
    std::vector<QubitKey> qubit_order;
    std::vector<Complex> amplitudes;

    /// Position of `key` in qubit_order; throws std::out_of_range if absent.
    std::size_t position(QubitKey key) const;
};

/// State-vector simulator holding qubits in entangling registers.
///
/// Each qubit lives in exactly one register. Two-qubit gates across
/// registers merge them by tensor product; registers are never split again
/// except by removing destructively measured qubits. Operations on disjoint
/// registers run in parallel, operations on one register are serialized.
///
/// Measurement randomness is drawn from the substream named after the
/// qubit's current owner, so each host sees an independent, replayable
/// sequence of outcomes.
class Backend {
public:
    explicit Backend(std::uint64_t seed = 0);
    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    RandomStreams& streams() noexcept { return streams_; }
    IdGenerator& ids() noexcept { return ids_; }

    /// Fresh |0> in its own register. Throws DuplicateQubitId if `label` is
    /// already live under `owner`.
    QubitKey create(const std::string& owner, const std::optional<std::string>& label = {});

    void apply(const Gate& gate, QubitKey q);
    /// Two-qubit gate with `q` as the first operand (control for CNOT).
    void apply(const Gate& gate, QubitKey q, QubitKey target);

    /// Born-rule measurement in the computational basis using the owner's
    /// random substream.
    int measure(QubitKey q, bool non_destructive);
    /// Same with an explicit uniform draw u in [0,1): outcome is 1 iff u < P(1).
    int measure_with(QubitKey q, bool non_destructive, double u);

    /// Destructively measures and discards the qubit. No-op for dead keys.
    void release(QubitKey q) noexcept;

    bool is_live(QubitKey q) const;
    std::string owner(QubitKey q) const;
    std::string label(QubitKey q) const;
    void set_owner(QubitKey q, const std::string& owner);
    void set_label(QubitKey q, const std::string& label);

    std::size_t live_qubits() const;
    std::size_t register_count() const;

#ifdef QNETSIM_DIAGNOSTICS
    /// Copy of the register containing `q`. Never mutates state.
    StateSnapshot inspect(QubitKey q) const;
#endif

private:
    struct Register {
        std::mutex mutex;
        std::vector<QubitKey> order;
        std::vector<Complex> amplitudes;
        bool retired = false;
    };
    using RegisterPtr = std::shared_ptr<Register>;

    struct Meta {
        std::string owner;
        std::string label;
    };

    RegisterPtr lookup(QubitKey q) const;
    QubitKey next_key();
    void release_label_locked(const Meta& meta);

    std::uint64_t seed_;
    RandomStreams streams_;
    IdGenerator ids_;

    mutable std::mutex index_mutex_;
    std::unordered_map<QubitKey, RegisterPtr> index_;
    std::unordered_map<QubitKey, Meta> meta_;
    std::map<std::pair<std::string, std::string>, int> labels_;
    QubitKey next_key_ = 1;
};

}  // namespace qnetsim::qsim
