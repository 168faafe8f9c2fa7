#ifndef NOTCHSCAN_POLYGON_HPP
#define NOTCHSCAN_POLYGON_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "core/element_matrices.hpp"

namespace notchscan {

/// Frequency-independent continued-fraction data of one polygon super-element:
/// Shat^(m)(chi) = S0^(m) + chi S1^(m) - chi^2 X^(m+1) (Shat^(m+1)(chi))^-1 X^(m+1)^T
/// with X^(m+1) = S1^(m) and chi = -omega^2. All terms carry q-sensitivities.
struct ContinuedFraction {
    struct Level {
        DMat S0, S1;
    };
    /// Complex copies of a level, cached so the per-frequency evaluation does
    /// not re-cast the real recursion data on every call.
    struct LevelC {
        Eigen::MatrixXcd S0, S1, S1t, dS0[2], dS1[2];
    };
    int n = 0;
    bool has_sensitivities = true;
    std::vector<Level> levels;    ///< m = 0..M
    std::vector<LevelC> levels_c;  ///< filled by continued_fraction_setup

    const Eigen::MatrixXd& static_stiffness() const { return levels.front().S0.v; }

    /// Dynamic stiffness at a complex frequency, value only.
    Eigen::MatrixXcd evaluate(std::complex<double> omega) const;
    /// Dynamic stiffness with d/dq1, d/dq2. Requires a setup that carried the
    /// sensitivities.
    ZMat evaluate_dual(std::complex<double> omega) const;
};

/// Seeds the recursion: S0^(0) from the algebraic Riccati equation
/// (S0 - E1) E0^-1 (S0 - E1^T) = E2 via the Hamiltonian eigen decomposition,
/// S1^(0) and all higher terms from Lyapunov/Sylvester solves in the same
/// spectral basis. Sensitivities propagate by linearizing each equation;
/// value-only callers can skip that propagation.
ContinuedFraction continued_fraction_setup(const PolygonMatrices& pm, int cf_order,
                                           bool with_sensitivities = true);

}  // namespace notchscan

#endif
