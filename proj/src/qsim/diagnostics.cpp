#include "qnetsim/qsim/diagnostics.hpp"

#ifdef QNETSIM_DIAGNOSTICS

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qnetsim::qsim {

DensityMatrix reduced_density_matrix(const StateSnapshot& state, const std::vector<QubitKey>& keep) {
    std::vector<std::size_t> kept_bits;
    std::size_t kept_mask = 0;
    for (QubitKey k : keep) {
        const std::size_t bit = state.position(k);
        kept_bits.push_back(bit);
        kept_mask |= std::size_t{1} << bit;
    }
    const std::size_t dim = std::size_t{1} << keep.size();
    DensityMatrix rho{dim, std::vector<Complex>(dim * dim)};

    auto reduced_index = [&](std::size_t full) {
        std::size_t r = 0;
        for (std::size_t i = 0; i < kept_bits.size(); ++i)
            if (full & (std::size_t{1} << kept_bits[i])) r |= std::size_t{1} << i;
        return r;
    };

    const auto& amps = state.amplitudes;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == Complex{}) continue;
        for (std::size_t j = 0; j < amps.size(); ++j) {
            // Entries only couple when the traced-out bits agree.
            if ((i & ~kept_mask) != (j & ~kept_mask)) continue;
            rho.data[reduced_index(i) * dim + reduced_index(j)] += amps[i] * std::conj(amps[j]);
        }
    }
    return rho;
}

double fidelity(const DensityMatrix& rho, const std::vector<Complex>& psi) {
    if (psi.size() != rho.dim) throw std::invalid_argument("dimension mismatch");
    Complex acc{};
    for (std::size_t r = 0; r < rho.dim; ++r)
        for (std::size_t c = 0; c < rho.dim; ++c) acc += std::conj(psi[r]) * rho.at(r, c) * psi[c];
    return acc.real();
}

double phi_plus_fidelity(const Qubit& a, const Qubit& b) {
    const StateSnapshot snap = a.inspect();
    const auto rho = reduced_density_matrix(snap, {a.key(), b.key()});
    const double r = 1.0 / std::numbers::sqrt2;
    return fidelity(rho, {r, 0, 0, r});
}

double state_fidelity(const Qubit& q, Complex alpha, Complex beta) {
    const auto rho = reduced_density_matrix(q.inspect(), {q.key()});
    return fidelity(rho, {alpha, beta});
}

}  // namespace qnetsim::qsim

#endif
