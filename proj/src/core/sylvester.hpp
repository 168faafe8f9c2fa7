#ifndef NOTCHSCAN_SYLVESTER_HPP
#define NOTCHSCAN_SYLVESTER_HPP

#include <Eigen/Dense>
#include <complex>

namespace notchscan {

/// Complex Schur factorization A = U T U^H, reusable across several Sylvester
/// solves with the same coefficient matrix.
struct SchurFactor {
    Eigen::MatrixXcd T, U;
    explicit SchurFactor(const Eigen::MatrixXcd& A);

    /// Factor of A^T without a second decomposition: A^T = conj(U) T^T conj(U)^H,
    /// and the order-reversing permutation turns the lower triangle back into
    /// an upper one.
    SchurFactor transposed() const;

  private:
    SchurFactor() = default;
};

/// Bartels-Stewart solve of A X + X B = C.
Eigen::MatrixXcd solve_sylvester(const SchurFactor& A, const SchurFactor& B,
                                 const Eigen::MatrixXcd& C);

inline Eigen::MatrixXcd solve_sylvester(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                        const Eigen::MatrixXcd& C) {
    return solve_sylvester(SchurFactor(A), SchurFactor(B), C);
}

}  // namespace notchscan

#endif
