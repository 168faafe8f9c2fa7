#ifndef NOTCHSCAN_MODEL_HPP
#define NOTCHSCAN_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "core/element_matrices.hpp"
#include "core/mesh.hpp"
#include "core/polygon.hpp"
#include "core/waveguide.hpp"

namespace notchscan {

/// Frequency-independent element data of a mesh: the cross-section matrices
/// shared by every waveguide super-element plus one continued fraction per
/// polygon super-element (indexed parallel to mesh.super_elements).
struct ElementData {
    CrossSectionMatrices cs;
    std::vector<ContinuedFraction> polygon_cf;
    std::vector<std::vector<int>> polygon_chain;
};

ElementData build_element_data(const Mesh& mesh, const Material& mat);

/// Global dynamic stiffness, dense over the mesh dofs (dof = 2*node + comp).
/// Waveguide blocks come from the shared modal solution, polygon blocks from
/// the continued fractions. With with_sensitivities the d/dq parts are filled.
ZMat assemble_stiffness(const Mesh& mesh, const ElementData& data,
                        const WaveguideModes& modes, bool with_sensitivities);

/// Consistent nodal loads of the unit traction pair tau1 = (1, 0)^T and
/// tau2 = (0, -1)^T on the sensor span of the top surface; n_dof x 2.
Eigen::MatrixXd assemble_tractions(const Mesh& mesh, const PlateGeometry& geom);

/// Global dof ids of the measurement points in flattening order: component
/// major, then x-index (u_x at every measurement point, then u_z).
std::vector<int> measurement_dofs(const Mesh& mesh, const PlateGeometry& geom);

/// Direct solve of S U = F for a dense complex-symmetric system.
Eigen::MatrixXcd solve_frequency(const Eigen::MatrixXcd& S, const Eigen::MatrixXd& F);

/// V_hat = (i omega) * U restricted to the given dof rows.
Eigen::MatrixXcd extract_velocities(const Eigen::MatrixXcd& U, const std::vector<int>& dofs,
                                    std::complex<double> omega);

}  // namespace notchscan

#endif
