#include "qnetsim/qsim/gate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qnetsim/core/errors.hpp"

namespace qnetsim::qsim {

std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::I: return "I";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::T: return "T";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::Custom1Q: return "CUSTOM1Q";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::Custom2Q: return "CUSTOM2Q";
    }
    return "?";
}

bool is_unitary(const Complex* m, int dim, double tol) {
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            Complex acc{};
            for (int k = 0; k < dim; ++k) acc += std::conj(m[k * dim + r]) * m[k * dim + c];
            const Complex expected = r == c ? Complex{1.0} : Complex{};
            if (std::abs(acc - expected) > tol) return false;
        }
    }
    return true;
}

Gate Gate::custom(const Matrix2& u) {
    if (!is_unitary(u.data(), 2)) throw NonUnitary("custom 2x2 matrix is not unitary");
    Gate g(GateKind::Custom1Q);
    g.custom_.assign(u.begin(), u.end());
    return g;
}

Gate Gate::custom(const Matrix4& u) {
    if (!is_unitary(u.data(), 4)) throw NonUnitary("custom 4x4 matrix is not unitary");
    Gate g(GateKind::Custom2Q);
    g.custom_.assign(u.begin(), u.end());
    return g;
}

int Gate::arity() const noexcept {
    switch (kind_) {
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::Custom2Q: return 2;
        default: return 1;
    }
}

Matrix2 Gate::matrix2() const {
    using namespace std::complex_literals;
    const double r = 1.0 / std::numbers::sqrt2;
    const double c = std::cos(angle_ / 2);
    const double s = std::sin(angle_ / 2);
    switch (kind_) {
        case GateKind::I: return {1, 0, 0, 1};
        case GateKind::X: return {0, 1, 1, 0};
        case GateKind::Y: return {0, -1i, 1i, 0};
        case GateKind::Z: return {1, 0, 0, -1};
        case GateKind::H: return {r, r, r, -r};
        case GateKind::S: return {1, 0, 0, 1i};
        case GateKind::T: return {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::RX: return {c, -1i * s, -1i * s, c};
        case GateKind::RY: return {c, -s, s, c};
        case GateKind::RZ: return {std::polar(1.0, -angle_ / 2), 0, 0, std::polar(1.0, angle_ / 2)};
        case GateKind::Custom1Q: return {custom_[0], custom_[1], custom_[2], custom_[3]};
        default: throw std::logic_error("matrix2() called on a two-qubit gate");
    }
}

Matrix4 Gate::matrix4() const {
    switch (kind_) {
        case GateKind::CNOT:
            return {1, 0, 0, 0,  //
                    0, 1, 0, 0,  //
                    0, 0, 0, 1,  //
                    0, 0, 1, 0};
        case GateKind::CZ:
            return {1, 0, 0, 0,  //
                    0, 1, 0, 0,  //
                    0, 0, 1, 0,  //
                    0, 0, 0, -1};
        case GateKind::Custom2Q: {
            Matrix4 m;
            for (int k = 0; k < 16; ++k) m[k] = custom_[k];
            return m;
        }
        default: throw std::logic_error("matrix4() called on a single-qubit gate");
    }
}

Gate Gate::adjoint() const {
    if (arity() == 1) {
        const Matrix2 m = matrix2();
        return custom(Matrix2{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])});
    }
    const Matrix4 m = matrix4();
    Matrix4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r * 4 + c] = std::conj(m[c * 4 + r]);
    return custom(out);
}

}  // namespace qnetsim::qsim
