#include "qnetsim/qsim/qubit.hpp"

#include <stdexcept>

#include "qnetsim/core/errors.hpp"

namespace qnetsim::qsim {

Qubit Qubit::create(std::shared_ptr<Backend> backend, const std::string& owner, const std::optional<std::string>& id) {
    const QubitKey key = backend->create(owner, id);
    return Qubit(std::move(backend), key);
}

void Qubit::require_live() const {
    if (!backend_ || key_ == 0) throw InvalidQubit("operation on an empty qubit handle");
    if (!backend_->is_live(key_)) throw InvalidQubit("operation on a released qubit");
}

std::string Qubit::id() const {
    require_live();
    return backend_->label(key_);
}

std::string Qubit::owner() const {
    require_live();
    return backend_->owner(key_);
}

void Qubit::set_id(const std::string& id) {
    require_live();
    backend_->set_label(key_, id);
}

void Qubit::set_owner(const std::string& owner) {
    require_live();
    backend_->set_owner(key_, owner);
}

void Qubit::apply(const Gate& gate) {
    require_live();
    backend_->apply(gate, key_);
}

void Qubit::apply(const Gate& gate, Qubit& target) {
    require_live();
    target.require_live();
    if (target.backend_ != backend_) throw std::invalid_argument("qubits belong to different backends");
    backend_->apply(gate, key_, target.key_);
}

int Qubit::measure(bool non_destructive) {
    require_live();
    const int outcome = backend_->measure(key_, non_destructive);
    if (!non_destructive) key_ = 0;
    return outcome;
}

void Qubit::release() noexcept {
    if (backend_ && key_ != 0) backend_->release(key_);
    key_ = 0;
}

#ifdef QNETSIM_DIAGNOSTICS
StateSnapshot Qubit::inspect() const {
    require_live();
    return backend_->inspect(key_);
}
#endif

std::pair<Qubit, Qubit> make_epr(const std::shared_ptr<Backend>& backend, const std::string& owner_a,
                                 const std::string& owner_b, const std::optional<std::string>& id) {
    const std::string label = id ? *id : backend->ids().next();
    Qubit a = Qubit::create(backend, owner_a, label);
    Qubit b = Qubit::create(backend, owner_b);
    b.set_id(label);
    a.h();
    a.cnot(b);
    return {std::move(a), std::move(b)};
}

std::vector<Qubit> make_ghz(const std::shared_ptr<Backend>& backend, const std::vector<std::string>& owners,
                            const std::optional<std::string>& id) {
    if (owners.empty()) throw std::invalid_argument("GHZ state needs at least one owner");
    const std::string label = id ? *id : backend->ids().next();
    std::vector<Qubit> out;
    out.reserve(owners.size());
    for (const auto& owner : owners) {
        out.push_back(Qubit::create(backend, owner));
        out.back().set_id(label);
    }
    out.front().h();
    for (std::size_t k = 1; k < out.size(); ++k) out[k - 1].cnot(out[k]);
    return out;
}

}  // namespace qnetsim::qsim
