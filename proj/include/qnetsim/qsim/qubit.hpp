#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnetsim/qsim/backend.hpp"

namespace qnetsim::qsim {

/// Owning, move-only handle to one simulated qubit.
///
/// A handle becomes invalid once it is moved from, released, or measured
/// destructively; any further operation throws InvalidQubit. A live handle
/// releases its qubit when destroyed.
class Qubit {
public:
    Qubit() = default;
    Qubit(std::shared_ptr<Backend> backend, QubitKey key) : backend_(std::move(backend)), key_(key) {}
    ~Qubit() { release(); }

    Qubit(Qubit&& other) noexcept : backend_(std::move(other.backend_)), key_(std::exchange(other.key_, 0)) {}
    Qubit& operator=(Qubit&& other) noexcept {
        if (this != &other) {
            release();
            backend_ = std::move(other.backend_);
            key_ = std::exchange(other.key_, 0);
        }
        return *this;
    }
    Qubit(const Qubit&) = delete;
    Qubit& operator=(const Qubit&) = delete;

    /// Fresh |0> owned by `owner`; `id` defaults to a random 32-hex-digit string.
    static Qubit create(std::shared_ptr<Backend> backend, const std::string& owner,
                        const std::optional<std::string>& id = {});

    bool valid() const { return backend_ && key_ != 0 && backend_->is_live(key_); }
    explicit operator bool() const { return valid(); }

    QubitKey key() const { return key_; }
    const std::shared_ptr<Backend>& backend() const { return backend_; }

    std::string id() const;
    std::string owner() const;
    void set_id(const std::string& id);
    void set_owner(const std::string& owner);

    void apply(const Gate& gate);
    void apply(const Gate& gate, Qubit& target);

    void i() { apply(Gate::i()); }
    void x() { apply(Gate::x()); }
    void y() { apply(Gate::y()); }
    void z() { apply(Gate::z()); }
    void h() { apply(Gate::h()); }
    void s() { apply(Gate::s()); }
    void t() { apply(Gate::t()); }
    void rx(double radians) { apply(Gate::rx(radians)); }
    void ry(double radians) { apply(Gate::ry(radians)); }
    void rz(double radians) { apply(Gate::rz(radians)); }
    void cnot(Qubit& target) { apply(Gate::cnot(), target); }
    void cz(Qubit& target) { apply(Gate::cz(), target); }

    /// Computational-basis measurement. A destructive measurement invalidates
    /// the handle; a non-destructive one leaves the collapsed qubit usable.
    int measure(bool non_destructive = false);

    /// Discards the qubit. No-op on an invalid handle.
    void release() noexcept;

#ifdef QNETSIM_DIAGNOSTICS
    StateSnapshot inspect() const;
#endif

private:
    void require_live() const;

    std::shared_ptr<Backend> backend_;
    QubitKey key_ = 0;
};

/// Two qubits in (|00> + |11>)/sqrt(2) sharing one id.
std::pair<Qubit, Qubit> make_epr(const std::shared_ptr<Backend>& backend, const std::string& owner_a,
                                 const std::string& owner_b, const std::optional<std::string>& id = {});

/// One qubit per owner in (|0...0> + |1...1>)/sqrt(2), built as H on the first
/// qubit followed by a CNOT chain. All qubits share one id.
std::vector<Qubit> make_ghz(const std::shared_ptr<Backend>& backend, const std::vector<std::string>& owners,
                            const std::optional<std::string>& id = {});

}  // namespace qnetsim::qsim
