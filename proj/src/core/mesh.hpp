#ifndef NOTCHSCAN_MESH_HPP
#define NOTCHSCAN_MESH_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "core/dual.hpp"

namespace notchscan {

struct Material {
    double rho = 7.9e3;  ///< kg/m^3
    double E = 200e9;    ///< Pa
    double nu = 0.3;

    bool valid() const { return rho > 0 && E > 0 && nu > -1.0 && nu < 0.5; }
    /// Plane-strain elasticity matrix in Voigt order (eps_xx, eps_zz, gamma_xz).
    Eigen::Matrix3d plane_strain_C() const;
};

/// Optimization unknowns: notch left-edge x position and notch depth.
struct NotchParams {
    double q1 = 0.0;  ///< m
    double q2 = 0.0;  ///< m
};

struct ParameterBox {
    Eigen::Vector2d lo{-40e-3, 0.1e-3};
    Eigen::Vector2d hi{40e-3, 1.1e-3};

    bool contains(const NotchParams& q) const {
        return q.q1 >= lo(0) && q.q1 <= hi(0) && q.q2 >= lo(1) && q.q2 <= hi(1);
    }
};

struct PlateGeometry {
    double x_min = -180e-3;
    double x_max = 170e-3;
    double thickness = 2e-3;
    double sensor_lo = -73e-3;  ///< sensor traction span on the top surface
    double sensor_hi = -70e-3;
    std::vector<double> measurement_xs;  ///< surface points, strictly increasing
    double notch_width = 0.5e-3;
    double band_margin = 0.75e-3;  ///< polygon band extension on each side of the notch

    static PlateGeometry standard();
};

/// Discretization knobs. The defaults follow degree 6 spectral shape
/// functions and a continued fraction of matching order.
struct MeshConfig {
    int degree = 6;        ///< polynomial degree p of the boundary elements
    int n_thick = 1;       ///< elements through the 2 mm thickness
    int band_top = 1;      ///< elements on each notch polygon's top edge
    int band_bottom = 1;   ///< elements on each notch polygon's bottom edge
    int band_divider = 1;  ///< elements on the interface between the notch polygons
    int sensor_top = 1;    ///< elements on the sensor polygon's top/bottom edges
    int cf_order = 6;      ///< continued-fraction order M
};

/// One boundary element: p+1 global node ids in traversal order.
struct BoundaryElement {
    std::vector<int> nodes;
};

struct SuperElement {
    enum class Kind { Waveguide, Polygon };
    Kind kind = Kind::Waveguide;
    std::string name;
    bool param_dependent = false;

    // Waveguide: cross-section lines at both ends, nodes bottom-to-top.
    DualReal x_left, x_right;
    std::vector<int> left_nodes, right_nodes;

    // Polygon: boundary chain (counterclockwise) and scaling center.
    std::vector<BoundaryElement> elements;
    std::array<DualReal, 2> scaling_center;
    bool closed = false;

    DualReal length() const { return x_right - x_left; }
    /// Unique chain node ids in traversal order (polygon only).
    std::vector<int> chain_nodes() const;
};

struct Mesh {
    MeshConfig config;
    std::vector<std::array<DualReal, 2>> nodes;  ///< global node coordinates
    std::vector<SuperElement> super_elements;
    std::vector<double> cross_section_z;  ///< through-thickness node z's, ascending

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_dof() const { return 2 * n_nodes(); }
    int node_at(double x, double z, double tol = 1e-9) const;

    /// Line-based text dump (nodes, super-elements) for debugging/golden tests.
    std::string dump() const;
};

/// Builds the plate cross-section decomposition for notch parameters q.
/// The q components enter as dual numbers seeded on directions 0 and 1, so
/// every node coordinate carries its sensitivities.
Mesh build_mesh(const PlateGeometry& geom, const NotchParams& q, const MeshConfig& config);

/// Star-convexity: every meshed boundary node of every polygon must see the
/// scaling center through the interior (positive boundary Jacobian).
bool star_convex(const Mesh& mesh);

}  // namespace notchscan

#endif
