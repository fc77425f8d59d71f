#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qres/errors.hpp"

namespace qres {

using Complex = std::complex<double>;

// Square complex matrix with an explicit per-entry comparison tolerance.
class ComplexMatrix {
public:
    explicit ComplexMatrix(Eigen::MatrixXcd entries);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& raw() const { return m_; }
    Complex operator()(int r, int c) const { return m_(r, c); }

    bool approx_equal(const ComplexMatrix& other, double tol = 1e-12) const;
    bool is_hermitian(double tol = 1e-12) const;
    double max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

    ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }
    static ComplexMatrix identity(int d);
    static ComplexMatrix zero(int d);

    friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator*(Complex s, const ComplexMatrix& a);

private:
    Eigen::MatrixXcd m_;
};

// Unit-norm complex vector.
class PureState {
public:
    explicit PureState(Eigen::VectorXcd amplitudes, double norm_tol = 1e-12);

    int dim() const { return static_cast<int>(v_.rows()); }
    const Eigen::VectorXcd& amplitudes() const { return v_; }
    Complex operator[](int i) const { return v_(i); }

    Complex inner(const PureState& other) const; // <this|other>
    ComplexMatrix projector() const;             // |psi><psi|

private:
    Eigen::VectorXcd v_;
};

// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m, double herm_tol = 1e-12,
                           double trace_tol = 1e-12, double eig_floor = -1e-10);

    int dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    const Eigen::MatrixXcd& raw() const { return m_.raw(); }

    static DensityMatrix pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int d);
    // r = (rx, ry, rz), |r| <= 1; d = 2 only.
    static DensityMatrix from_bloch(double rx, double ry, double rz);

private:
    ComplexMatrix m_;
};

// Hermitian matrix with spectrum in [0, 1]: a POVM element K†K.
class Effect {
public:
    explicit Effect(ComplexMatrix m, double herm_tol = 1e-12, double eig_tol = 1e-10);

    int dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    const Eigen::MatrixXcd& raw() const { return m_.raw(); }

    static Effect projector(const PureState& psi);
    static Effect identity(int d);
    Effect complement() const; // identity - this

private:
    ComplexMatrix m_;
};

enum class PauliAxis { X, Y, Z };

ComplexMatrix pauli(PauliAxis which);

// Z_d = sum_i w^i |i><i| and X_d = sum_i |i><i+1 mod d|, w = exp(2 pi i / d).
ComplexMatrix generalized_pauli_z(int d);
ComplexMatrix generalized_pauli_x(int d);

// |psi_{y0 y1}> = X_d^{y0} Z_d^{y1} |psi_00>,
// |psi_00> = ((sqrt(d)+1)|0> + sum_{i>=1} |i>) / sqrt(2 sqrt(d) (1+sqrt(d))).
PureState qrac_state(int d, int y0, int y1);

// Computational basis vector |i> in dimension d.
PureState ket(int d, int i);
PureState plus_state();    // (|0>+|1>)/sqrt2
PureState minus_state();   // (|0>-|1>)/sqrt2
PureState plus_y_state();  // (|0>+i|1>)/sqrt2
PureState minus_y_state(); // (|0>-i|1>)/sqrt2

// Rotated qubit bases. {|bar0>, |bar1>} diagonalize (sx+sz)/sqrt2 with
// eigenvalues +1/-1. {|barplus>, |barminus>} diagonalize (sx-sz)/sqrt2; there
// the labels ride on the -1/+1 eigenvectors, the assignment under which the
// reference realizations reach their quoted witness values.
PureState bar_zero();   // (cos pi/8,  sin pi/8)
PureState bar_one();    // (sin pi/8, -cos pi/8)
PureState bar_plus();   // (cos pi/8, -sin pi/8)
PureState bar_minus();  // (sin pi/8,  cos pi/8)

// Eigenvector of X_d with eigenvalue w^k: (1/sqrt d) sum_i w^{ik} |i>.
PureState fourier_state(int d, int k);

// d^2 pure states whose projectors are linearly independent and span the
// space of d x d Hermitian operators: |i> for i < d, then for each pair
// i < j the states (|i>+|j>)/sqrt2 and (|i>+i|j>)/sqrt2.
std::vector<PureState> operator_basis_states(int d);

// Eigenpairs of a Hermitian matrix, eigenvalues descending, eigenvectors
// orthonormal with the first nonzero component made real-positive.
std::vector<std::pair<double, PureState>> spectral_decomposition(const ComplexMatrix& m,
                                                                 double herm_tol = 1e-10);

} // namespace qres
