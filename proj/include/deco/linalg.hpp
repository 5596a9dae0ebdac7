// linalg.hpp — Dense complex linear algebra helpers and superoperator conventions
//
// Vectorization is column-stacking: vec(rho)[i + d*j] = rho(i, j).
// A map rho -> X rho Y then has the matrix kron(Y^T, X).

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "deco/errors.hpp"

namespace deco {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vector vectorize(const Matrix& m) {
    Vector v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
    return v;
}

inline Matrix unvectorize(const Vector& v, int dim) {
    Matrix m(dim, dim);
    Eigen::Index k = 0;
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) m(i, j) = v(k++);
    return m;
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// max_ij |m - m^dagger| -- zero for exactly Hermitian input
inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

inline bool approx_hermitian(const Matrix& m, double tol_rel) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return hermiticity_defect(m) <= tol_rel * scale;
}

// rho -> X rho
inline Matrix left_mul_super(const Matrix& x) {
    return kron(Matrix::Identity(x.rows(), x.cols()), x);
}

// rho -> rho Y
inline Matrix right_mul_super(const Matrix& y) {
    return kron(y.transpose(), Matrix::Identity(y.rows(), y.cols()));
}

// rho -> X rho Y
inline Matrix sandwich_super(const Matrix& x, const Matrix& y) { return kron(y.transpose(), x); }

// d^2 x d^2 matrix acting on column-stacked density matrices
struct SuperOperator {
    int dim{0};
    Matrix matrix;

    SuperOperator() = default;
    SuperOperator(int d, Matrix m) : dim(d), matrix(std::move(m)) {
        if (matrix.rows() != dim * dim || matrix.cols() != dim * dim)
            throw ValidationError("SuperOperator: matrix must be d^2 x d^2");
    }

    static SuperOperator zero(int d) { return SuperOperator(d, Matrix::Zero(d * d, d * d)); }

    Matrix apply(const Matrix& rho) const { return unvectorize(matrix * vectorize(rho), dim); }
};

// Reshuffle a superoperator matrix S into the coefficient matrix c with
// Phi(rho) = sum_IJ c_IJ e_I rho e_J^dagger, where e_I = |i><i'| and
// I = i*d + i'. The same reshuffle sends a completed map to its Choi matrix,
// C[(i,k),(j,l)] = <i| map(E_kl) |j>.
Matrix choi_reshuffle(const Matrix& superop, int dim);

// General matrix exponential (scaling-and-squaring Pade). Throws
// ExponentialDivergence when the result is not finite.
Matrix matrix_exp(const Matrix& m);

// exp(scale * H) for Hermitian H via eigendecomposition
Matrix hermitian_exp(const Matrix& h, Complex scale);

struct EigExtremes {
    double min_eig{0.0};
    double max_eig{0.0};
};

// Eigenvalue extremes of a Hermitian matrix (input is Hermitized first)
EigExtremes hermitian_eig_extremes(const Matrix& m);

// Eigenvalues of a Hermitian matrix, ascending
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

// Checks for density-matrix invariants: Hermitian, unit trace, PSD.
// Throws ValidationError naming the failed property.
void validate_density(const Matrix& rho, double tol = 1e-10);

} // namespace deco
