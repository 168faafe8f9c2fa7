#ifndef NOTCHSCAN_WAVEGUIDE_HPP
#define NOTCHSCAN_WAVEGUIDE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "core/element_matrices.hpp"

namespace notchscan {

/// Modal solution of the waveguide at one complex frequency. Family l decays
/// toward +x (Re mu < 0, excited at the left end), family r toward -x. The
/// internal force modes are q = (mu E0 + E1^T) psi.
struct WaveguideModes {
    std::complex<double> omega;
    Eigen::VectorXcd mu_l, mu_r;
    Eigen::MatrixXcd psi_l, psi_r, q_l, q_r;
};

WaveguideModes solve_modes(const CrossSectionMatrices& cs, std::complex<double> omega);

/// Dynamic stiffness of a waveguide section of length L, dofs ordered
/// [left cross-section; right cross-section]. The sensitivities follow the
/// dual directions carried by L (the section end positions move with q1).
ZMat waveguide_stiffness(const WaveguideModes& modes, const DualReal& L);

struct DispersionPoint {
    double frequency = 0.0;  ///< Hz
    char family = '?';       ///< 'S' symmetric, 'A' antisymmetric
    int order = 0;           ///< 0 = fundamental, by descending Re k per family
    double wavelength = 0.0;
    double re_k = 0.0, im_k = 0.0;
};

/// Propagating modes (|Im k| * thickness < 0.01) over a list of real
/// frequencies, labeled by through-thickness parity.
std::vector<DispersionPoint> dispersion_curves(const CrossSectionMatrices& cs,
                                               const std::vector<double>& z_nodes,
                                               const std::vector<double>& frequencies);

}  // namespace notchscan

#endif
