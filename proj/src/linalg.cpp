#include "deco/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace deco {

Matrix choi_reshuffle(const Matrix& superop, int dim) {
    const int d2 = dim * dim;
    if (superop.rows() != d2 || superop.cols() != d2)
        throw ValidationError("choi_reshuffle: superoperator must be d^2 x d^2");
    Matrix c(d2, d2);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j)
                for (int l = 0; l < dim; ++l)
                    c(i * dim + k, j * dim + l) = superop(i + dim * j, k + dim * l);
    return c;
}

Matrix matrix_exp(const Matrix& m) {
    Matrix e = m.exp();
    if (!e.allFinite()) throw ExponentialDivergence("matrix_exp: non-finite result");
    return e;
}

Matrix hermitian_exp(const Matrix& h, Complex scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
    const Eigen::VectorXd& w = es.eigenvalues();
    Vector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(scale * w(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

EigExtremes hermitian_eig_extremes(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& w = es.eigenvalues();
    return EigExtremes{w(0), w(w.size() - 1)};
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

void validate_density(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
    if (!approx_hermitian(rho, tol)) throw ValidationError("density matrix not Hermitian");
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (tr_err > tol) throw ValidationError("density matrix trace differs from 1");
    const auto ext = hermitian_eig_extremes(rho);
    if (ext.min_eig < -tol) throw ValidationError("density matrix not positive semidefinite");
}

} // namespace deco
