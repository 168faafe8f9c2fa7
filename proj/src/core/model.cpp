#include "core/model.hpp"

#include <cmath>
#include <stdexcept>

namespace notchscan {

namespace {

using Complexd = std::complex<double>;

void scatter(ZMat& S, const ZMat& local, const std::vector<int>& nodes, bool with_sens) {
    const int nn = static_cast<int>(nodes.size());
    for (int a = 0; a < nn; ++a)
        for (int b = 0; b < nn; ++b)
            for (int ca = 0; ca < 2; ++ca)
                for (int cb = 0; cb < 2; ++cb) {
                    const int gi = 2 * nodes[a] + ca, gj = 2 * nodes[b] + cb;
                    const int li = 2 * a + ca, lj = 2 * b + cb;
                    S.v(gi, gj) += local.v(li, lj);
                    if (with_sens) {
                        S.d0(gi, gj) += local.d0(li, lj);
                        S.d1(gi, gj) += local.d1(li, lj);
                    }
                }
}

}  // namespace

ElementData build_element_data(const Mesh& mesh, const Material& mat) {
    ElementData data;
    data.cs = waveguide_matrices(mesh.cross_section_z, mesh.config.degree,
                                 mesh.config.n_thick, mat);
    data.polygon_cf.resize(mesh.super_elements.size());
    data.polygon_chain.resize(mesh.super_elements.size());
    for (size_t i = 0; i < mesh.super_elements.size(); ++i) {
        const auto& se = mesh.super_elements[i];
        if (se.kind != SuperElement::Kind::Polygon) continue;
        const PolygonMatrices pm = polygon_matrices(mesh, se, mat);
        data.polygon_cf[i] = continued_fraction_setup(pm, mesh.config.cf_order);
        data.polygon_chain[i] = pm.chain;
    }
    return data;
}

ZMat assemble_stiffness(const Mesh& mesh, const ElementData& data,
                        const WaveguideModes& modes, bool with_sensitivities) {
    const int n = mesh.n_dof();
    ZMat S(n, n);
    for (size_t i = 0; i < mesh.super_elements.size(); ++i) {
        const auto& se = mesh.super_elements[i];
        if (se.kind == SuperElement::Kind::Waveguide) {
            const ZMat local = waveguide_stiffness(modes, se.length());
            std::vector<int> nodes = se.left_nodes;
            nodes.insert(nodes.end(), se.right_nodes.begin(), se.right_nodes.end());
            scatter(S, local, nodes, with_sensitivities);
        } else {
            const auto& cf = data.polygon_cf[i];
            if (with_sensitivities && se.param_dependent) {
                scatter(S, cf.evaluate_dual(modes.omega), data.polygon_chain[i], true);
            } else {
                ZMat local;
                local.v = cf.evaluate(modes.omega);
                scatter(S, local, data.polygon_chain[i], false);
            }
        }
    }
    return S;
}

Eigen::MatrixXd assemble_tractions(const Mesh& mesh, const PlateGeometry& geom) {
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(mesh.n_dof(), 2);
    const double tol = 1e-9;
    const Eigen::Vector2d tau1(1.0, 0.0), tau2(0.0, -1.0);
    bool found = false;
    for (const auto& se : mesh.super_elements) {
        if (se.kind != SuperElement::Kind::Polygon) continue;
        for (const auto& el : se.elements) {
            bool on_sensor = true;
            for (int n : el.nodes) {
                const double x = mesh.nodes[n][0].v, z = mesh.nodes[n][1].v;
                if (std::abs(z) > tol || x < geom.sensor_lo - tol || x > geom.sensor_hi + tol)
                    on_sensor = false;
            }
            if (!on_sensor) continue;
            found = true;
            const Eigen::VectorXd f1 = edge_load(mesh, el, tau1, mesh.config.degree);
            const Eigen::VectorXd f2 = edge_load(mesh, el, tau2, mesh.config.degree);
            for (size_t i = 0; i < el.nodes.size(); ++i) {
                F(2 * el.nodes[i], 0) += f1(2 * i);
                F(2 * el.nodes[i] + 1, 0) += f1(2 * i + 1);
                F(2 * el.nodes[i], 1) += f2(2 * i);
                F(2 * el.nodes[i] + 1, 1) += f2(2 * i + 1);
            }
        }
    }
    if (!found) throw std::runtime_error("assemble_tractions: sensor span not mesh-aligned");
    return F;
}

std::vector<int> measurement_dofs(const Mesh& mesh, const PlateGeometry& geom) {
    std::vector<int> dofs;
    for (int comp = 0; comp < 2; ++comp)
        for (double x : geom.measurement_xs) {
            const int n = mesh.node_at(x, 0.0);
            if (n < 0)
                throw std::runtime_error("measurement_dofs: no mesh node at a measurement point");
            dofs.push_back(2 * n + comp);
        }
    return dofs;
}

Eigen::MatrixXcd solve_frequency(const Eigen::MatrixXcd& S, const Eigen::MatrixXd& F) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
    const Eigen::MatrixXcd U = lu.solve(F.cast<Complexd>());
    if (!U.allFinite()) throw std::runtime_error("solve_frequency: factorization failed");
    return U;
}

Eigen::MatrixXcd extract_velocities(const Eigen::MatrixXcd& U, const std::vector<int>& dofs,
                                    std::complex<double> omega) {
    Eigen::MatrixXcd V(dofs.size(), U.cols());
    for (size_t i = 0; i < dofs.size(); ++i) V.row(i) = Complexd(0.0, 1.0) * omega * U.row(dofs[i]);
    return V;
}

}  // namespace notchscan
