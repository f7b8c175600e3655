#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

namespace qnetsim::qsim {

using Complex = std::complex<double>;
/// Row-major 2x2 matrix.
using Matrix2 = std::array<Complex, 4>;
/// Row-major 4x4 matrix over the basis |a b> with index 2*a + b, where a is
/// the first operand of a two-qubit gate (the control for CNOT).
using Matrix4 = std::array<Complex, 16>;

inline constexpr double kTolerance = 1e-9;

enum class GateKind { I, X, Y, Z, H, S, T, RX, RY, RZ, Custom1Q, CNOT, CZ, Custom2Q };

std::string_view to_string(GateKind kind) noexcept;

/// A gate description: a fixed kind, a rotation angle, or a custom unitary.
class Gate {
public:
    static Gate i() { return Gate(GateKind::I); }
    static Gate x() { return Gate(GateKind::X); }
    static Gate y() { return Gate(GateKind::Y); }
    static Gate z() { return Gate(GateKind::Z); }
    static Gate h() { return Gate(GateKind::H); }
    static Gate s() { return Gate(GateKind::S); }
    static Gate t() { return Gate(GateKind::T); }
    static Gate rx(double radians) { return Gate(GateKind::RX, radians); }
    static Gate ry(double radians) { return Gate(GateKind::RY, radians); }
    static Gate rz(double radians) { return Gate(GateKind::RZ, radians); }
    static Gate cnot() { return Gate(GateKind::CNOT); }
    static Gate cz() { return Gate(GateKind::CZ); }
    /// Throws NonUnitary unless U^dagger U = I within kTolerance.
    static Gate custom(const Matrix2& u);
    static Gate custom(const Matrix4& u);

    GateKind kind() const noexcept { return kind_; }
    double angle() const noexcept { return angle_; }
    /// Number of qubits the gate acts on (1 or 2).
    int arity() const noexcept;

    /// Only valid for single-qubit kinds.
    Matrix2 matrix2() const;
    /// Only valid for two-qubit kinds.
    Matrix4 matrix4() const;

    /// The inverse gate, expressed as a custom unitary.
    Gate adjoint() const;

private:
    explicit Gate(GateKind kind, double angle = 0.0) : kind_(kind), angle_(angle) {}

    GateKind kind_;
    double angle_ = 0.0;
    std::vector<Complex> custom_;
};

bool is_unitary(const Complex* m, int dim, double tol = kTolerance);

}  // namespace qnetsim::qsim
