#pragma once

// State inspection helpers. Only available in diagnostics builds
// (QNETSIM_DIAGNOSTICS), which the test suites require.

#ifdef QNETSIM_DIAGNOSTICS

#include <vector>

#include "qnetsim/qsim/qubit.hpp"

namespace qnetsim::qsim {

/// Row-major dim x dim density matrix.
struct DensityMatrix {
    std::size_t dim = 0;
    std::vector<Complex> data;

    Complex at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

/// Traces out every qubit of `state` except `keep`; keep[i] becomes bit i of
/// the reduced basis index.
DensityMatrix reduced_density_matrix(const StateSnapshot& state, const std::vector<QubitKey>& keep);

/// <psi| rho |psi> for a normalized pure state psi of matching dimension.
double fidelity(const DensityMatrix& rho, const std::vector<Complex>& psi);

/// Fidelity of the joint state of (a, b) with (|00> + |11>)/sqrt(2).
double phi_plus_fidelity(const Qubit& a, const Qubit& b);

/// Fidelity of q's reduced state with the single-qubit pure state (alpha, beta).
double state_fidelity(const Qubit& q, Complex alpha, Complex beta);

}  // namespace qnetsim::qsim

#endif
