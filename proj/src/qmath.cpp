#include "qres/qmath.hpp"

#include <cmath>
#include <numbers>

namespace qres {

namespace {

constexpr double kPi = std::numbers::pi;

// First component with magnitude above tol is rotated to the positive real axis.
Eigen::VectorXcd fix_phase(Eigen::VectorXcd v, double tol = 1e-9) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > tol) {
            v *= std::conj(v(i)) / mag;
            break;
        }
    }
    return v;
}

} // namespace

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
        throw InvalidInput("ComplexMatrix: entries must be square and nonempty, got " +
                           std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double tol) const {
    if (dim() != other.dim()) return false;
    return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix ComplexMatrix::identity(int d) {
    return ComplexMatrix(Eigen::MatrixXcd::Identity(d, d));
}

ComplexMatrix ComplexMatrix::zero(int d) {
    return ComplexMatrix(Eigen::MatrixXcd::Zero(d, d));
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.m_ + b.m_);
}
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.m_ - b.m_);
}
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.m_ * b.m_);
}
ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
    return ComplexMatrix(s * a.m_);
}

PureState::PureState(Eigen::VectorXcd amplitudes, double norm_tol) : v_(std::move(amplitudes)) {
    if (v_.rows() < 1) throw InvalidInput("PureState: empty amplitude vector");
    const double n = v_.norm();
    if (std::abs(n - 1.0) > norm_tol) {
        throw InvalidInput("PureState: norm " + std::to_string(n) + " is not 1 within " +
                           std::to_string(norm_tol));
    }
}

Complex PureState::inner(const PureState& other) const {
    if (dim() != other.dim()) throw InvalidInput("PureState::inner: dimension mismatch");
    return v_.dot(other.v_); // Eigen's dot conjugates the left argument
}

ComplexMatrix PureState::projector() const {
    return ComplexMatrix(v_ * v_.adjoint());
}

DensityMatrix::DensityMatrix(ComplexMatrix m, double herm_tol, double trace_tol,
                             double eig_floor)
    : m_(std::move(m)) {
    if (!m_.is_hermitian(herm_tol)) {
        throw InvalidInput("DensityMatrix: not Hermitian within " + std::to_string(herm_tol));
    }
    const Complex tr = m_.raw().trace();
    if (std::abs(tr - 1.0) > trace_tol) {
        throw InvalidInput("DensityMatrix: trace " + std::to_string(tr.real()) +
                           " is not 1 within " + std::to_string(trace_tol));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_.raw(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < eig_floor) {
        throw InvalidInput("DensityMatrix: minimum eigenvalue " + std::to_string(min_eig) +
                           " below floor " + std::to_string(eig_floor));
    }
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    if (d < 2) throw InvalidInput("maximally_mixed: d must be >= 2");
    return DensityMatrix(ComplexMatrix(Eigen::MatrixXcd::Identity(d, d) / double(d)));
}

DensityMatrix DensityMatrix::from_bloch(double rx, double ry, double rz) {
    const double n = std::sqrt(rx * rx + ry * ry + rz * rz);
    if (n > 1.0 + 1e-12) {
        throw InvalidInput("from_bloch: Bloch vector norm " + std::to_string(n) + " exceeds 1");
    }
    Eigen::MatrixXcd m(2, 2);
    m(0, 0) = Complex(0.5 * (1.0 + rz), 0.0);
    m(1, 1) = Complex(0.5 * (1.0 - rz), 0.0);
    m(0, 1) = Complex(0.5 * rx, -0.5 * ry);
    m(1, 0) = Complex(0.5 * rx, 0.5 * ry);
    return DensityMatrix(ComplexMatrix(std::move(m)));
}

Effect::Effect(ComplexMatrix m, double herm_tol, double eig_tol) : m_(std::move(m)) {
    if (!m_.is_hermitian(herm_tol)) {
        throw InvalidInput("Effect: not Hermitian within " + std::to_string(herm_tol));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_.raw(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -eig_tol || hi > 1.0 + eig_tol) {
        throw InvalidInput("Effect: spectrum [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] outside [0, 1] within " + std::to_string(eig_tol));
    }
}

Effect Effect::projector(const PureState& psi) {
    return Effect(psi.projector());
}

Effect Effect::identity(int d) {
    return Effect(ComplexMatrix::identity(d));
}

Effect Effect::complement() const {
    return Effect(ComplexMatrix(Eigen::MatrixXcd::Identity(dim(), dim()) - m_.raw()));
}

ComplexMatrix pauli(PauliAxis which) {
    Eigen::MatrixXcd m(2, 2);
    switch (which) {
    case PauliAxis::X:
        m << 0, 1, 1, 0;
        break;
    case PauliAxis::Y:
        m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
        break;
    case PauliAxis::Z:
        m << 1, 0, 0, -1;
        break;
    }
    return ComplexMatrix(std::move(m));
}

ComplexMatrix generalized_pauli_z(int d) {
    if (d < 2) throw InvalidInput("generalized_pauli_z: d must be >= 2, got " + std::to_string(d));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        m(i, i) = std::polar(1.0, 2.0 * kPi * i / d);
    }
    return ComplexMatrix(std::move(m));
}

ComplexMatrix generalized_pauli_x(int d) {
    if (d < 2) throw InvalidInput("generalized_pauli_x: d must be >= 2, got " + std::to_string(d));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        m(i, (i + 1) % d) = 1.0; // |i><i+1 mod d|
    }
    return ComplexMatrix(std::move(m));
}

PureState qrac_state(int d, int y0, int y1) {
    if (d < 2) throw InvalidInput("qrac_state: d must be >= 2");
    if (y0 < 0 || y0 >= d || y1 < 0 || y1 >= d) {
        throw InvalidInput("qrac_state: indices (" + std::to_string(y0) + ", " +
                           std::to_string(y1) + ") out of range for d=" + std::to_string(d));
    }
    const double sd = std::sqrt(double(d));
    const double norm = std::sqrt(2.0 * sd * (1.0 + sd));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(d, Complex(1.0 / norm, 0.0));
    psi(0) = Complex((sd + 1.0) / norm, 0.0);

    const Eigen::MatrixXcd x = generalized_pauli_x(d).raw();
    const Eigen::MatrixXcd z = generalized_pauli_z(d).raw();
    for (int k = 0; k < y1; ++k) psi = z * psi;
    for (int k = 0; k < y0; ++k) psi = x * psi;
    return PureState(std::move(psi));
}

PureState ket(int d, int i) {
    if (d < 1 || i < 0 || i >= d) {
        throw InvalidInput("ket: index " + std::to_string(i) + " out of range for d=" +
                           std::to_string(d));
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v(i) = 1.0;
    return PureState(std::move(v));
}

namespace {
PureState qubit(double a0, Complex a1) {
    Eigen::VectorXcd v(2);
    v << Complex(a0, 0.0), a1;
    return PureState(std::move(v));
}
} // namespace

PureState plus_state() { return qubit(std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0); }
PureState minus_state() { return qubit(std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0); }
PureState plus_y_state() { return qubit(std::numbers::sqrt2 / 2.0, Complex(0.0, std::numbers::sqrt2 / 2.0)); }
PureState minus_y_state() { return qubit(std::numbers::sqrt2 / 2.0, Complex(0.0, -std::numbers::sqrt2 / 2.0)); }

PureState bar_zero() { return qubit(std::cos(kPi / 8), std::sin(kPi / 8)); }
PureState bar_one() { return qubit(std::sin(kPi / 8), -std::cos(kPi / 8)); }
PureState bar_plus() { return qubit(std::cos(kPi / 8), -std::sin(kPi / 8)); }
PureState bar_minus() { return qubit(std::sin(kPi / 8), std::cos(kPi / 8)); }

PureState fourier_state(int d, int k) {
    if (d < 2 || k < 0 || k >= d) {
        throw InvalidInput("fourier_state: index " + std::to_string(k) + " out of range for d=" +
                           std::to_string(d));
    }
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        v(i) = std::polar(1.0 / std::sqrt(double(d)), 2.0 * kPi * i * k / d);
    }
    return PureState(std::move(v));
}

std::vector<PureState> operator_basis_states(int d) {
    if (d < 2) throw InvalidInput("operator_basis_states: d must be >= 2");
    std::vector<PureState> states;
    states.reserve(d * d);
    for (int i = 0; i < d; ++i) states.push_back(ket(d, i));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXcd sym = Eigen::VectorXcd::Zero(d);
            sym(i) = inv_sqrt2;
            sym(j) = inv_sqrt2;
            states.emplace_back(std::move(sym));
            Eigen::VectorXcd imag = Eigen::VectorXcd::Zero(d);
            imag(i) = inv_sqrt2;
            imag(j) = Complex(0.0, inv_sqrt2);
            states.emplace_back(std::move(imag));
        }
    }
    return states;
}

std::vector<std::pair<double, PureState>> spectral_decomposition(const ComplexMatrix& m,
                                                                 double herm_tol) {
    if (!m.is_hermitian(herm_tol)) {
        throw ContractViolation("spectral_decomposition: input not Hermitian within " +
                                std::to_string(herm_tol));
    }
    // Symmetrize so the solver sees an exactly Hermitian matrix.
    const Eigen::MatrixXcd h = 0.5 * (m.raw() + m.raw().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
        throw ContractViolation("spectral_decomposition: eigensolver failed");
    }
    std::vector<std::pair<double, PureState>> out;
    out.reserve(m.dim());
    for (int i = m.dim() - 1; i >= 0; --i) { // solver sorts ascending
        out.emplace_back(es.eigenvalues()(i), PureState(fix_phase(es.eigenvectors().col(i))));
    }
    return out;
}

} // namespace qres
