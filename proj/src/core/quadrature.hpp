#ifndef NOTCHSCAN_QUADRATURE_HPP
#define NOTCHSCAN_QUADRATURE_HPP

#include <Eigen/Dense>
#include <vector>

namespace notchscan {

/// Gauss-Lobatto-Legendre rule and the Lagrange basis on its nodes, on [-1,1].
/// degree p means p+1 nodes including both endpoints; the quadrature is exact
/// for polynomials up to degree 2p-1.
struct LobattoBasis {
    int degree = 0;
    Eigen::VectorXd nodes;    ///< p+1 points, nodes(0) = -1, nodes(p) = +1
    Eigen::VectorXd weights;  ///< matching quadrature weights, sum = 2

    /// Lagrange shape functions evaluated at x: N_i(x).
    Eigen::VectorXd shape(double x) const;
    /// First derivatives N_i'(x).
    Eigen::VectorXd shape_deriv(double x) const;
};

LobattoBasis lobatto_basis(int degree);

/// Gauss-Legendre rule with n points (exact through degree 2n-1); used for
/// full integration of the element matrices.
struct GaussRule {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};

GaussRule gauss_rule(int n);

}  // namespace notchscan

#endif
