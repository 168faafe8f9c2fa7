#ifndef NOTCHSCAN_ELEMENT_MATRICES_HPP
#define NOTCHSCAN_ELEMENT_MATRICES_HPP

#include <Eigen/Dense>
#include <complex>

#include "core/dual.hpp"
#include "core/mesh.hpp"

namespace notchscan {

/// Matrix with forward-mode sensitivities in the two parameter directions.
template <typename Scalar>
struct DMatT {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat v, d0, d1;

    DMatT() = default;
    DMatT(Eigen::Index r, Eigen::Index c)
        : v(Mat::Zero(r, c)), d0(Mat::Zero(r, c)), d1(Mat::Zero(r, c)) {}
    explicit DMatT(const Mat& value)
        : v(value), d0(Mat::Zero(value.rows(), value.cols())),
          d1(Mat::Zero(value.rows(), value.cols())) {}

    Eigen::Index rows() const { return v.rows(); }
    Eigen::Index cols() const { return v.cols(); }

    DMatT transpose() const { return {v.transpose(), d0.transpose(), d1.transpose()}; }
    DMatT(Mat value, Mat dq1, Mat dq2) : v(std::move(value)), d0(std::move(dq1)), d1(std::move(dq2)) {}

    friend DMatT operator+(const DMatT& a, const DMatT& b) {
        return {a.v + b.v, a.d0 + b.d0, a.d1 + b.d1};
    }
    friend DMatT operator-(const DMatT& a, const DMatT& b) {
        return {a.v - b.v, a.d0 - b.d0, a.d1 - b.d1};
    }
    friend DMatT operator*(const DMatT& a, const DMatT& b) {
        return {a.v * b.v, a.d0 * b.v + a.v * b.d0, a.d1 * b.v + a.v * b.d1};
    }
    friend DMatT operator*(const Dual<Scalar, 2>& s, const DMatT& a) {
        return {s.v * a.v, s.d[0] * a.v + s.v * a.d0, s.d[1] * a.v + s.v * a.d1};
    }
    friend DMatT operator*(Scalar s, const DMatT& a) { return {s * a.v, s * a.d0, s * a.d1}; }

    DMatT& operator+=(const DMatT& o) {
        v += o.v;
        d0 += o.d0;
        d1 += o.d1;
        return *this;
    }
};

using DMat = DMatT<double>;
using ZMat = DMatT<std::complex<double>>;

inline ZMat complexify(const DMat& a) {
    return {a.v.cast<std::complex<double>>(), a.d0.cast<std::complex<double>>(),
            a.d1.cast<std::complex<double>>()};
}

/// Coefficient matrices of a waveguide cross-section (through-thickness line).
/// Dof order follows the cross-section nodes bottom to top, (u_x, u_z) pairs.
struct CrossSectionMatrices {
    Eigen::MatrixXd E0, E1, E2, M0;
    int n_dof = 0;
};

CrossSectionMatrices waveguide_matrices(const std::vector<double>& z_nodes, int degree,
                                        int n_thick, const Material& mat);

/// Coefficient matrices of a polygon super-element boundary, relative to its
/// scaling center. Dof order follows chain_nodes(), (u_x, u_z) pairs. The
/// sensitivities track the notch parameters carried by the node coordinates.
struct PolygonMatrices {
    DMat E0, E1, E2, M0;
    std::vector<int> chain;  ///< global node ids behind the local dofs
};

PolygonMatrices polygon_matrices(const Mesh& mesh, const SuperElement& se, const Material& mat);

/// Consistent nodal load of a constant traction on one boundary element,
/// ordered like the element's nodes: f = integral N^T tau ds.
Eigen::VectorXd edge_load(const Mesh& mesh, const BoundaryElement& el,
                          const Eigen::Vector2d& traction, int degree);

}  // namespace notchscan

#endif
