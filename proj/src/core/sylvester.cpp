#include "core/sylvester.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace notchscan {

SchurFactor::SchurFactor(const Eigen::MatrixXcd& A) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A, true);
    if (schur.info() != Eigen::Success) throw std::runtime_error("SchurFactor: decomposition failed");
    T = schur.matrixT();
    U = schur.matrixU();
}

SchurFactor SchurFactor::transposed() const {
    SchurFactor f;
    f.T = T.reverse().transpose();
    f.U = U.conjugate().rowwise().reverse();
    return f;
}

Eigen::MatrixXcd solve_sylvester(const SchurFactor& A, const SchurFactor& B,
                                 const Eigen::MatrixXcd& C) {
    const Eigen::Index n = A.T.rows(), m = B.T.rows();
    if (C.rows() != n || C.cols() != m) throw std::invalid_argument("solve_sylvester: shape mismatch");
    const Eigen::MatrixXcd D = A.U.adjoint() * C * B.U;
    Eigen::MatrixXcd Y(n, m);
    const double scale = A.T.norm() + B.T.norm();
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXcd rhs = D.col(k);
        if (k > 0) rhs -= Y.leftCols(k) * B.T.block(0, k, k, 1);
        // (T_A + T_B(k,k) I) y = rhs, back substitution on the triangle.
        const std::complex<double> mu = B.T(k, k);
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            std::complex<double> s = rhs(i);
            for (Eigen::Index j = i + 1; j < n; ++j) s -= A.T(i, j) * Y(j, k);
            const std::complex<double> piv = A.T(i, i) + mu;
            if (std::abs(piv) < 1e-14 * scale)
                throw std::runtime_error("solve_sylvester: singular spectrum pairing");
            Y(i, k) = s / piv;
        }
    }
    return A.U * Y * B.U.adjoint();
}

}  // namespace notchscan
