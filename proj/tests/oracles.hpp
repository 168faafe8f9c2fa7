#ifndef NOTCHSCAN_TEST_ORACLES_HPP
#define NOTCHSCAN_TEST_ORACLES_HPP

// Independent numerical oracles used by the unit and acceptance tests:
//  - Rayleigh-Lamb dispersion root finder for the fundamental plate modes,
//  - a square polygon super-element mesh builder,
//  - a conventional quadratic-quad FEM dynamic stiffness condensed onto the
//    square's boundary.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/mesh.hpp"
#include "core/quadrature.hpp"

namespace oracles {

// cos(sqrt(s) h) continued through negative s (cosh branch).
inline double cos_sq(double s, double h) {
    return s >= 0.0 ? std::cos(std::sqrt(s) * h) : std::cosh(std::sqrt(-s) * h);
}
// sin(sqrt(s) h)/sqrt(s), entire in s.
inline double sinc_sq(double s, double h) {
    if (std::abs(s) < 1e-30) return h;
    return s > 0.0 ? std::sin(std::sqrt(s) * h) / std::sqrt(s)
                   : std::sinh(std::sqrt(-s) * h) / std::sqrt(-s);
}

// Real-valued Rayleigh-Lamb characteristic functions with the q (symmetric)
// resp. p (antisymmetric) factor removed.
inline double lamb_char(char family, double k, double omega, double h, double cL, double cT) {
    const double p2 = omega * omega / (cL * cL) - k * k;
    const double q2 = omega * omega / (cT * cT) - k * k;
    const double d = k * k - q2;
    if (family == 'S')
        return d * d * cos_sq(p2, h) * sinc_sq(q2, h) + 4.0 * k * k * p2 * sinc_sq(p2, h) * cos_sq(q2, h);
    return d * d * sinc_sq(p2, h) * cos_sq(q2, h) + 4.0 * k * k * q2 * cos_sq(p2, h) * sinc_sq(q2, h);
}

// Largest real wavenumber root = the fundamental mode (A0 or S0).
inline double rayleigh_lamb_k(char family, double omega, double h, double cL, double cT) {
    const double k_hi = 6.0 * omega / cT;
    const double k_lo = 0.02 * omega / cL;
    const int n_scan = 20000;
    double prev_k = k_hi, prev_f = lamb_char(family, k_hi, omega, h, cL, cT);
    for (int i = 1; i <= n_scan; ++i) {
        const double k = k_hi + (k_lo - k_hi) * i / n_scan;
        const double f = lamb_char(family, k, omega, h, cL, cT);
        if (f == 0.0) return k;
        if ((f > 0.0) != (prev_f > 0.0)) {
            double a = k, b = prev_k;
            double fa = f;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = lamb_char(family, m, omega, h, cL, cT);
                if ((fm > 0.0) == (fa > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if (std::abs(b - a) < 1e-12 * std::abs(a)) break;
            }
            return 0.5 * (a + b);
        }
        prev_k = k;
        prev_f = f;
    }
    throw std::runtime_error("rayleigh_lamb_k: no root found");
}

inline double shear_speed(const notchscan::Material& m) {
    return std::sqrt(m.E / (2.0 * (1.0 + m.nu)) / m.rho);
}
inline double longitudinal_speed(const notchscan::Material& m) {
    const double lam = m.E * m.nu / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
    const double mu = m.E / (2.0 * (1.0 + m.nu));
    return std::sqrt((lam + 2.0 * mu) / m.rho);
}

// Square [-a/2, a/2]^2 as one closed polygon super-element, k boundary
// elements of degree p per side, counterclockwise.
inline notchscan::Mesh make_square_mesh(double a, int p, int k) {
    using notchscan::DualReal;
    notchscan::Mesh mesh;
    mesh.config.degree = p;
    const auto basis = notchscan::lobatto_basis(p);
    auto insert = [&](double x, double z) {
        for (int i = 0; i < mesh.n_nodes(); ++i)
            if (std::abs(mesh.nodes[i][0].v - x) < 1e-12 && std::abs(mesh.nodes[i][1].v - z) < 1e-12)
                return i;
        mesh.nodes.push_back({DualReal(x), DualReal(z)});
        return mesh.n_nodes() - 1;
    };
    const double c[5][2] = {{-a / 2, -a / 2}, {a / 2, -a / 2}, {a / 2, a / 2},
                            {-a / 2, a / 2}, {-a / 2, -a / 2}};
    notchscan::SuperElement se;
    se.kind = notchscan::SuperElement::Kind::Polygon;
    se.name = "square";
    se.closed = true;
    se.scaling_center = {DualReal(0.0), DualReal(0.0)};
    for (int side = 0; side < 4; ++side)
        for (int e = 0; e < k; ++e) {
            notchscan::BoundaryElement el;
            for (int i = 0; i <= p; ++i) {
                const double s = (e + (basis.nodes(i) + 1.0) / 2.0) / k;
                el.nodes.push_back(insert(c[side][0] + s * (c[side + 1][0] - c[side][0]),
                                          c[side][1] + s * (c[side + 1][1] - c[side][1])));
            }
            se.elements.push_back(el);
        }
    mesh.super_elements.push_back(se);
    return mesh;
}

// Shared assembly for the square FEM oracles: sparse dynamic stiffness
// K - omega^2 M on an n x n grid of 9-node quadratic quads, then a Schur
// complement onto the dofs selected by bnode (grid node ids, 2 dofs each,
// x then z, in the given order).
inline Eigen::MatrixXd fem_square_schur(double a, int n, double omega,
                                        const notchscan::Material& mat,
                                        const std::vector<int>& bnode) {
    const int nn = 2 * n + 1;  // grid nodes per direction
    const double h = a / n;
    auto nid = [&](int ix, int iz) { return iz * nn + ix; };
    const Eigen::Matrix3d C = mat.plane_strain_C();

    // quadratic Lagrange on {-1,0,1}
    auto shp = [](double x, int i) {
        return i == 0 ? 0.5 * x * (x - 1.0) : (i == 1 ? 1.0 - x * x : 0.5 * x * (x + 1.0));
    };
    auto dshp = [](double x, int i) {
        return i == 0 ? x - 0.5 : (i == 1 ? -2.0 * x : x + 0.5);
    };
    const auto g = notchscan::gauss_rule(3);

    Eigen::Matrix<double, 18, 18> Ke, Me;
    Ke.setZero();
    Me.setZero();
    const double J = h / 2.0;  // per direction
    for (int gx = 0; gx < 3; ++gx)
        for (int gz = 0; gz < 3; ++gz) {
            const double w = g.weights(gx) * g.weights(gz) * J * J;
            Eigen::Matrix<double, 3, 18> B;
            B.setZero();
            Eigen::Matrix<double, 1, 9> N;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const int node = j * 3 + i;
                    N(node) = shp(g.points(gx), i) * shp(g.points(gz), j);
                    const double dNdx = dshp(g.points(gx), i) * shp(g.points(gz), j) / J;
                    const double dNdz = shp(g.points(gx), i) * dshp(g.points(gz), j) / J;
                    B(0, 2 * node) = dNdx;
                    B(1, 2 * node + 1) = dNdz;
                    B(2, 2 * node) = dNdz;
                    B(2, 2 * node + 1) = dNdx;
                }
            Ke += w * B.transpose() * C * B;
            for (int i = 0; i < 9; ++i)
                for (int j = 0; j < 9; ++j) {
                    Me(2 * i, 2 * j) += w * mat.rho * N(i) * N(j);
                    Me(2 * i + 1, 2 * j + 1) += w * mat.rho * N(i) * N(j);
                }
        }

    const int n_dof = 2 * nn * nn;
    std::vector<Eigen::Triplet<double>> trips;
    for (int ex = 0; ex < n; ++ex)
        for (int ez = 0; ez < n; ++ez) {
            int map[9];
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i) map[j * 3 + i] = nid(2 * ex + i, 2 * ez + j);
            for (int i = 0; i < 9; ++i)
                for (int jj = 0; jj < 9; ++jj)
                    for (int da = 0; da < 2; ++da)
                        for (int db = 0; db < 2; ++db) {
                            const double v = Ke(2 * i + da, 2 * jj + db) -
                                             omega * omega * Me(2 * i + da, 2 * jj + db);
                            if (v != 0.0)
                                trips.emplace_back(2 * map[i] + da, 2 * map[jj] + db, v);
                        }
        }
    Eigen::SparseMatrix<double> D(n_dof, n_dof);
    D.setFromTriplets(trips.begin(), trips.end());

    std::vector<bool> is_boundary(nn * nn, false);
    for (int b : bnode) is_boundary[b] = true;
    std::vector<int> interior;
    for (int i = 0; i < nn * nn; ++i)
        if (!is_boundary[i]) interior.push_back(i);

    // permute into [boundary; interior] dense blocks
    const int nb = 2 * static_cast<int>(bnode.size());
    const int ni = 2 * static_cast<int>(interior.size());
    std::vector<int> perm(n_dof, -1);
    for (size_t b = 0; b < bnode.size(); ++b) {
        perm[2 * bnode[b]] = 2 * static_cast<int>(b);
        perm[2 * bnode[b] + 1] = 2 * static_cast<int>(b) + 1;
    }
    for (size_t i = 0; i < interior.size(); ++i) {
        perm[2 * interior[i]] = nb + 2 * static_cast<int>(i);
        perm[2 * interior[i] + 1] = nb + 2 * static_cast<int>(i) + 1;
    }
    std::vector<Eigen::Triplet<double>> tii;
    Eigen::MatrixXd Dbb = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd Dib = Eigen::MatrixXd::Zero(ni, nb);
    for (int col = 0; col < D.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, col); it; ++it) {
            const int r = perm[it.row()], c = perm[it.col()];
            if (r < nb && c < nb)
                Dbb(r, c) += it.value();
            else if (r >= nb && c < nb)
                Dib(r - nb, c) += it.value();
            else if (r >= nb && c >= nb)
                tii.emplace_back(r - nb, c - nb, it.value());
        }
    Eigen::SparseMatrix<double> Dii(ni, ni);
    Dii.setFromTriplets(tii.begin(), tii.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Dii);
    if (lu.info() != Eigen::Success) throw std::runtime_error("fem_square_schur: LU failed");
    const Eigen::MatrixXd X = lu.solve(Dib);
    return Dbb - Dib.transpose() * X;
}

// Dynamic stiffness condensed onto the given boundary node coordinates, which
// must coincide with grid nodes of the n x n quadratic mesh.
inline Eigen::MatrixXd fem_square_condensed(double a, int n, double omega,
                                            const notchscan::Material& mat,
                                            const std::vector<std::array<double, 2>>& boundary) {
    const int nn = 2 * n + 1;
    const double h = a / n;
    std::vector<int> bnode(boundary.size());
    for (size_t b = 0; b < boundary.size(); ++b) {
        const int ix = static_cast<int>(std::lround((boundary[b][0] + a / 2) / (h / 2)));
        const int iz = static_cast<int>(std::lround((boundary[b][1] + a / 2) / (h / 2)));
        if (std::abs(-a / 2 + ix * h / 2 - boundary[b][0]) > 1e-10 ||
            std::abs(-a / 2 + iz * h / 2 - boundary[b][1]) > 1e-10)
            throw std::runtime_error("fem_square_condensed: boundary node off grid");
        bnode[b] = iz * nn + ix;
    }
    return fem_square_schur(a, n, omega, mat, bnode);
}

// Reference dynamic stiffness on the chain dofs of a square polygon
// super-element: FEM grid `refine` times finer than the chain subdivision,
// condensed onto the full fine boundary, then restricted through the chain's
// Lagrange trace interpolation T, giving T^T S_fem T. The fine boundary
// resolves the roughest chain mode, which a same-spacing grid cannot.
inline Eigen::MatrixXd fem_square_refined(double a, int refine, double omega,
                                          const notchscan::Material& mat,
                                          const notchscan::Mesh& mesh,
                                          const notchscan::SuperElement& se,
                                          const std::vector<int>& chain) {
    const int p = static_cast<int>(se.elements.front().nodes.size()) - 1;
    const int k_side = static_cast<int>(se.elements.size()) / 4;  // elements per side
    const int n = k_side * refine;                                // FEM elements per side
    const int nn = 2 * n + 1;
    const double h2 = a / (2 * n);  // fine grid node spacing

    // fine boundary nodes, counterclockwise from (-a/2, -a/2)
    std::vector<int> bnode;
    std::vector<std::array<double, 2>> bxy;
    auto push = [&](int ix, int iz) {
        bnode.push_back(iz * nn + ix);
        bxy.push_back({-a / 2 + ix * h2, -a / 2 + iz * h2});
    };
    for (int i = 0; i < 2 * n; ++i) push(i, 0);
    for (int i = 0; i < 2 * n; ++i) push(2 * n, i);
    for (int i = 0; i < 2 * n; ++i) push(2 * n - i, 2 * n);
    for (int i = 0; i < 2 * n; ++i) push(0, 2 * n - i);
    const Eigen::MatrixXd S_full = fem_square_schur(a, n, omega, mat, bnode);

    std::vector<int> chain_pos(mesh.n_nodes(), -1);
    for (size_t c = 0; c < chain.size(); ++c) chain_pos[chain[c]] = static_cast<int>(c);
    const auto basis = notchscan::lobatto_basis(p);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * bnode.size(), 2 * chain.size());
    for (size_t b = 0; b < bnode.size(); ++b) {
        bool placed = false;
        for (const auto& el : se.elements) {
            const auto& p0 = mesh.nodes[el.nodes.front()];
            const auto& p1 = mesh.nodes[el.nodes.back()];
            const double dx = p1[0].v - p0[0].v, dz = p1[1].v - p0[1].v;
            const double len2 = dx * dx + dz * dz;
            const double t = ((bxy[b][0] - p0[0].v) * dx + (bxy[b][1] - p0[1].v) * dz) / len2;
            const double off = std::abs((bxy[b][0] - p0[0].v) * dz - (bxy[b][1] - p0[1].v) * dx);
            if (off > 1e-9 * a || t < -1e-9 || t > 1.0 + 1e-9) continue;
            const Eigen::VectorXd N = basis.shape(2.0 * t - 1.0);
            for (int i = 0; i <= p; ++i) {
                const int c = chain_pos[el.nodes[i]];
                T(2 * b, 2 * c) += N(i);
                T(2 * b + 1, 2 * c + 1) += N(i);
            }
            placed = true;
            break;
        }
        if (!placed) throw std::runtime_error("fem_square_refined: boundary node unmatched");
    }
    return T.transpose() * S_full * T;
}

// Fine FEM on the ray-scaled mesh of a polygon super-element: the same
// circumferential basis as the chain (degree-p Lobatto nodes), radially a
// geometric stack of quadratic layers from the boundary (xi = 1) down to a
// tiny traction-free hole at xi_min (field energy there is O(xi_min^2)).
// Schur-condensed onto the boundary ring, whose dofs coincide with the chain
// dofs, this converges to the exact radial solution of the semi-discrete
// problem and therefore independently validates the modal/continued-fraction
// stiffness at any frequency.
inline Eigen::MatrixXd fem_polygon_rays(const notchscan::Mesh& mesh,
                                        const notchscan::SuperElement& se,
                                        const std::vector<int>& chain, double omega,
                                        const notchscan::Material& mat,
                                        double xi_min = 1e-3, double rho = 0.993) {
    using notchscan::lobatto_basis;
    const int p = static_cast<int>(se.elements.front().nodes.size()) - 1;
    const int nc = static_cast<int>(chain.size());
    const auto basis = lobatto_basis(p);
    const Eigen::Matrix3d C = mat.plane_strain_C();
    const double cx = se.scaling_center[0].v, cz = se.scaling_center[1].v;

    // ring radii: geometric with ratio rho per ring, two rings per element
    std::vector<double> xi{1.0};
    while (xi.back() > xi_min) xi.push_back(xi.back() * rho);
    if (xi.size() % 2 == 0) xi.push_back(xi.back() * rho);  // even layer count
    const int n_ring = static_cast<int>(xi.size());
    const int n_layer = (n_ring - 1) / 2;

    std::vector<int> chain_pos(mesh.n_nodes(), -1);
    for (int c = 0; c < nc; ++c) chain_pos[chain[c]] = c;
    auto nid = [&](int ring, int c) { return ring * nc + c; };
    const int n_dof = 2 * n_ring * nc;

    // tensor shape: degree p (Lobatto) in eta x quadratic (equispaced) in zeta
    auto shp_r = [](double z, int i) {
        return i == 0 ? 0.5 * z * (z - 1.0) : (i == 1 ? 1.0 - z * z : 0.5 * z * (z + 1.0));
    };
    auto dshp_r = [](double z, int i) {
        return i == 0 ? z - 0.5 : (i == 1 ? -2.0 * z : z + 0.5);
    };
    const auto ge = notchscan::gauss_rule(p + 2);
    const auto gr = notchscan::gauss_rule(3);

    std::vector<Eigen::Triplet<double>> trips;
    const int nen = 3 * (p + 1);
    Eigen::MatrixXd De(2 * nen, 2 * nen);
    for (int layer = 0; layer < n_layer; ++layer) {
        const double xs[3] = {xi[2 * layer], xi[2 * layer + 1], xi[2 * layer + 2]};
        for (const auto& el : se.elements) {
            // nodal coordinates: ring j, chain node i at xs[j] * (boundary pt)
            Eigen::VectorXd nx(nen), nz(nen);
            std::vector<int> map(nen);
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i <= p; ++i) {
                    const int a = j * (p + 1) + i;
                    const auto& nd = mesh.nodes[el.nodes[i]];
                    nx(a) = cx + xs[j] * (nd[0].v - cx);
                    nz(a) = cz + xs[j] * (nd[1].v - cz);
                    map[a] = nid(2 * layer + j, chain_pos[el.nodes[i]]);
                }
            De.setZero();
            for (int ga = 0; ga < ge.points.size(); ++ga)
                for (int gb = 0; gb < 3; ++gb) {
                    const double eta = ge.points(ga), zet = gr.points(gb);
                    const Eigen::VectorXd Ne = basis.shape(eta), dNe = basis.shape_deriv(eta);
                    Eigen::VectorXd N(nen), dNdeta(nen), dNdzet(nen);
                    for (int j = 0; j < 3; ++j)
                        for (int i = 0; i <= p; ++i) {
                            const int a = j * (p + 1) + i;
                            N(a) = Ne(i) * shp_r(zet, j);
                            dNdeta(a) = dNe(i) * shp_r(zet, j);
                            dNdzet(a) = Ne(i) * dshp_r(zet, j);
                        }
                    const double x_eta = dNdeta.dot(nx), z_eta = dNdeta.dot(nz);
                    const double x_zet = dNdzet.dot(nx), z_zet = dNdzet.dot(nz);
                    const double detJ = x_eta * z_zet - z_eta * x_zet;
                    const double adet = std::abs(detJ);
                    Eigen::VectorXd dNdx = (z_zet * dNdeta - z_eta * dNdzet) / detJ;
                    Eigen::VectorXd dNdz = (-x_zet * dNdeta + x_eta * dNdzet) / detJ;
                    const double w = ge.weights(ga) * gr.weights(gb) * adet;
                    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * nen);
                    for (int a = 0; a < nen; ++a) {
                        B(0, 2 * a) = dNdx(a);
                        B(1, 2 * a + 1) = dNdz(a);
                        B(2, 2 * a) = dNdz(a);
                        B(2, 2 * a + 1) = dNdx(a);
                    }
                    De += w * B.transpose() * C * B;
                    for (int a = 0; a < nen; ++a)
                        for (int b = 0; b < nen; ++b) {
                            const double mm = -omega * omega * w * mat.rho * N(a) * N(b);
                            De(2 * a, 2 * b) += mm;
                            De(2 * a + 1, 2 * b + 1) += mm;
                        }
                }
            for (int a = 0; a < nen; ++a)
                for (int b = 0; b < nen; ++b)
                    for (int da = 0; da < 2; ++da)
                        for (int db = 0; db < 2; ++db)
                            trips.emplace_back(2 * map[a] + da, 2 * map[b] + db,
                                               De(2 * a + da, 2 * b + db));
        }
    }
    Eigen::SparseMatrix<double> D(n_dof, n_dof);
    D.setFromTriplets(trips.begin(), trips.end());

    // boundary ring 0 first, everything else interior (inner hole edge free)
    const int nb = 2 * nc, ni = n_dof - nb;
    Eigen::MatrixXd Dbb = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd Dib = Eigen::MatrixXd::Zero(ni, nb);
    std::vector<Eigen::Triplet<double>> tii;
    for (int col = 0; col < D.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, col); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (r < nb && c < nb)
                Dbb(r, c) += it.value();
            else if (r >= nb && c < nb)
                Dib(r - nb, c) += it.value();
            else if (r >= nb && c >= nb)
                tii.emplace_back(r - nb, c - nb, it.value());
        }
    Eigen::SparseMatrix<double> Dii(ni, ni);
    Dii.setFromTriplets(tii.begin(), tii.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Dii);
    if (lu.info() != Eigen::Success) throw std::runtime_error("fem_polygon_rays: LU failed");
    const Eigen::MatrixXd X = lu.solve(Dib);
    return Dbb - Dib.transpose() * X;
}

}  // namespace oracles

#endif
