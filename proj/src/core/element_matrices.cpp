#include "core/element_matrices.hpp"

#include <stdexcept>
#include <unordered_map>

#include "core/quadrature.hpp"

namespace notchscan {

namespace {

// Voigt order (eps_xx, eps_zz, gamma_xz); x is the waveguide axis resp. the
// radial direction, z resp. eta the transverse one.
const Eigen::Matrix<double, 3, 2> kB1 = [] {
    Eigen::Matrix<double, 3, 2> b;
    b << 1, 0, 0, 0, 0, 1;
    return b;
}();
const Eigen::Matrix<double, 3, 2> kB2 = [] {
    Eigen::Matrix<double, 3, 2> b;
    b << 0, 0, 0, 1, 1, 0;
    return b;
}();

}  // namespace

CrossSectionMatrices waveguide_matrices(const std::vector<double>& z_nodes, int degree,
                                        int n_thick, const Material& mat) {
    const int p = degree;
    const int nn = static_cast<int>(z_nodes.size());
    if (nn != n_thick * p + 1)
        throw std::invalid_argument("waveguide_matrices: node count mismatch");
    const Eigen::Matrix3d C = mat.plane_strain_C();
    const LobattoBasis basis = lobatto_basis(p);
    const GaussRule rule = gauss_rule(p + 2);

    CrossSectionMatrices out;
    out.n_dof = 2 * nn;
    out.E0 = Eigen::MatrixXd::Zero(out.n_dof, out.n_dof);
    out.E1 = out.E0;
    out.E2 = out.E0;
    out.M0 = out.E0;

    const int ndl = 2 * (p + 1);
    for (int e = 0; e < n_thick; ++e) {
        const int base = e * p;
        const double J = 0.5 * (z_nodes[base + p] - z_nodes[base]);
        if (!(J > 0)) throw std::invalid_argument("waveguide_matrices: bad element span");
        Eigen::MatrixXd E0l = Eigen::MatrixXd::Zero(ndl, ndl), E1l = E0l, E2l = E0l, M0l = E0l;
        for (int g = 0; g < rule.points.size(); ++g) {
            const double w = rule.weights(g);
            const Eigen::VectorXd N = basis.shape(rule.points(g));
            const Eigen::VectorXd dN = basis.shape_deriv(rule.points(g));
            Eigen::MatrixXd B1(3, ndl), B2(3, ndl);
            for (int i = 0; i <= p; ++i) {
                B1.middleCols(2 * i, 2) = N(i) * kB1;
                B2.middleCols(2 * i, 2) = (dN(i) / J) * kB2;
            }
            E0l += w * J * B1.transpose() * C * B1;
            E1l += w * J * B2.transpose() * C * B1;
            E2l += w * J * B2.transpose() * C * B2;
            for (int i = 0; i <= p; ++i)
                for (int j = 0; j <= p; ++j) {
                    const double m = w * J * mat.rho * N(i) * N(j);
                    M0l(2 * i, 2 * j) += m;
                    M0l(2 * i + 1, 2 * j + 1) += m;
                }
        }
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const int gi = 2 * (base + i) + a, gj = 2 * (base + j) + b;
                        out.E0(gi, gj) += E0l(2 * i + a, 2 * j + b);
                        out.E1(gi, gj) += E1l(2 * i + a, 2 * j + b);
                        out.E2(gi, gj) += E2l(2 * i + a, 2 * j + b);
                        out.M0(gi, gj) += M0l(2 * i + a, 2 * j + b);
                    }
    }
    return out;
}

PolygonMatrices polygon_matrices(const Mesh& mesh, const SuperElement& se, const Material& mat) {
    if (se.kind != SuperElement::Kind::Polygon)
        throw std::invalid_argument("polygon_matrices: waveguide super-element passed");
    const int p = mesh.config.degree;
    const Eigen::Matrix3d C = mat.plane_strain_C();
    const LobattoBasis basis = lobatto_basis(p);
    const GaussRule rule = gauss_rule(p + 2);

    PolygonMatrices out;
    out.chain = se.chain_nodes();
    std::unordered_map<int, int> local;
    for (size_t i = 0; i < out.chain.size(); ++i) local[out.chain[i]] = static_cast<int>(i);
    const int nd = 2 * static_cast<int>(out.chain.size());
    out.E0 = DMat(nd, nd);
    out.E1 = DMat(nd, nd);
    out.E2 = DMat(nd, nd);
    out.M0 = DMat(nd, nd);

    const int ndl = 2 * (p + 1);
    for (const auto& el : se.elements) {
        std::vector<DualReal> xb(p + 1), zb(p + 1);
        for (int i = 0; i <= p; ++i) {
            xb[i] = mesh.nodes[el.nodes[i]][0] - se.scaling_center[0];
            zb[i] = mesh.nodes[el.nodes[i]][1] - se.scaling_center[1];
        }
        DMat E0l(ndl, ndl), E1l(ndl, ndl), E2l(ndl, ndl), M0l(ndl, ndl);
        for (int g = 0; g < rule.points.size(); ++g) {
            const double w = rule.weights(g);
            const Eigen::VectorXd N = basis.shape(rule.points(g));
            const Eigen::VectorXd dN = basis.shape_deriv(rule.points(g));
            DualReal x(0.0), z(0.0), dx(0.0), dz(0.0);
            for (int i = 0; i <= p; ++i) {
                x += N(i) * xb[i];
                z += N(i) * zb[i];
                dx += dN(i) * xb[i];
                dz += dN(i) * zb[i];
            }
            const DualReal J = x * dz - z * dx;
            if (!(J.v > 0))
                throw std::invalid_argument("polygon_matrices: non-positive boundary Jacobian");
            const DualReal invJ = 1.0 / J;
            DMat b1(3, 2), b2(3, 2);
            auto put = [](DMat& m, int r, int c, const DualReal& a) {
                m.v(r, c) = a.v;
                m.d0(r, c) = a.d[0];
                m.d1(r, c) = a.d[1];
            };
            put(b1, 0, 0, invJ * dz);
            put(b1, 1, 1, -(invJ * dx));
            put(b1, 2, 0, -(invJ * dx));
            put(b1, 2, 1, invJ * dz);
            put(b2, 0, 0, -(invJ * z));
            put(b2, 1, 1, invJ * x);
            put(b2, 2, 0, invJ * x);
            put(b2, 2, 1, -(invJ * z));
            DMat B1(3, ndl), B2(3, ndl);
            for (int i = 0; i <= p; ++i) {
                B1.v.middleCols(2 * i, 2) = N(i) * b1.v;
                B1.d0.middleCols(2 * i, 2) = N(i) * b1.d0;
                B1.d1.middleCols(2 * i, 2) = N(i) * b1.d1;
                B2.v.middleCols(2 * i, 2) = dN(i) * b2.v;
                B2.d0.middleCols(2 * i, 2) = dN(i) * b2.d0;
                B2.d1.middleCols(2 * i, 2) = dN(i) * b2.d1;
            }
            const DualReal wJ = w * J;
            const DMat CB1 = DMat(Eigen::MatrixXd(C)) * B1;
            const DMat CB2 = DMat(Eigen::MatrixXd(C)) * B2;
            E0l += wJ * (B1.transpose() * CB1);
            E1l += wJ * (B2.transpose() * CB1);
            E2l += wJ * (B2.transpose() * CB2);
            for (int i = 0; i <= p; ++i)
                for (int j = 0; j <= p; ++j) {
                    const DualReal m = (mat.rho * N(i) * N(j)) * wJ;
                    for (int a = 0; a < 2; ++a) {
                        M0l.v(2 * i + a, 2 * j + a) += m.v;
                        M0l.d0(2 * i + a, 2 * j + a) += m.d[0];
                        M0l.d1(2 * i + a, 2 * j + a) += m.d[1];
                    }
                }
        }
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j) {
                const int gi = 2 * local.at(el.nodes[i]), gj = 2 * local.at(el.nodes[j]);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        out.E0.v(gi + a, gj + b) += E0l.v(2 * i + a, 2 * j + b);
                        out.E0.d0(gi + a, gj + b) += E0l.d0(2 * i + a, 2 * j + b);
                        out.E0.d1(gi + a, gj + b) += E0l.d1(2 * i + a, 2 * j + b);
                        out.E1.v(gi + a, gj + b) += E1l.v(2 * i + a, 2 * j + b);
                        out.E1.d0(gi + a, gj + b) += E1l.d0(2 * i + a, 2 * j + b);
                        out.E1.d1(gi + a, gj + b) += E1l.d1(2 * i + a, 2 * j + b);
                        out.E2.v(gi + a, gj + b) += E2l.v(2 * i + a, 2 * j + b);
                        out.E2.d0(gi + a, gj + b) += E2l.d0(2 * i + a, 2 * j + b);
                        out.E2.d1(gi + a, gj + b) += E2l.d1(2 * i + a, 2 * j + b);
                        out.M0.v(gi + a, gj + b) += M0l.v(2 * i + a, 2 * j + b);
                        out.M0.d0(gi + a, gj + b) += M0l.d0(2 * i + a, 2 * j + b);
                        out.M0.d1(gi + a, gj + b) += M0l.d1(2 * i + a, 2 * j + b);
                    }
            }
    }
    return out;
}

Eigen::VectorXd edge_load(const Mesh& mesh, const BoundaryElement& el,
                          const Eigen::Vector2d& traction, int degree) {
    const int p = degree;
    const LobattoBasis basis = lobatto_basis(p);
    const GaussRule rule = gauss_rule(p + 2);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * (p + 1));
    for (int g = 0; g < rule.points.size(); ++g) {
        const Eigen::VectorXd N = basis.shape(rule.points(g));
        const Eigen::VectorXd dN = basis.shape_deriv(rule.points(g));
        double dx = 0, dz = 0;
        for (int i = 0; i <= p; ++i) {
            dx += dN(i) * mesh.nodes[el.nodes[i]][0].v;
            dz += dN(i) * mesh.nodes[el.nodes[i]][1].v;
        }
        const double ds = std::hypot(dx, dz);
        for (int i = 0; i <= p; ++i) {
            f(2 * i) += rule.weights(g) * N(i) * ds * traction(0);
            f(2 * i + 1) += rule.weights(g) * N(i) * ds * traction(1);
        }
    }
    return f;
}

}  // namespace notchscan
