#include "core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "core/quadrature.hpp"

namespace notchscan {

Eigen::Matrix3d Material::plane_strain_C() const {
    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Eigen::Matrix3d C;
    C << f * (1.0 - nu), f * nu, 0.0,
         f * nu, f * (1.0 - nu), 0.0,
         0.0, 0.0, f * (1.0 - 2.0 * nu) / 2.0;
    return C;
}

PlateGeometry PlateGeometry::standard() {
    PlateGeometry g;
    for (int i = 0; i < 11; ++i) g.measurement_xs.push_back(-66e-3 + 2e-3 * i);
    return g;
}

std::vector<int> SuperElement::chain_nodes() const {
    std::vector<int> out;
    for (const auto& e : elements)
        for (size_t i = 0; i < e.nodes.size(); ++i) {
            if (!out.empty() && e.nodes[i] == out.back()) continue;
            out.push_back(e.nodes[i]);
        }
    if (closed && out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
}

int Mesh::node_at(double x, double z, double tol) const {
    for (int i = 0; i < n_nodes(); ++i)
        if (std::abs(nodes[i][0].v - x) < tol && std::abs(nodes[i][1].v - z) < tol) return i;
    return -1;
}

namespace {

class NodeTable {
  public:
    explicit NodeTable(std::vector<std::array<DualReal, 2>>& nodes) : nodes_(nodes) {}

    int insert(const DualReal& x, const DualReal& z) {
        constexpr double tol = 1e-9;
        for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
            if (std::abs(nodes_[i][0].v - x.v) < tol && std::abs(nodes_[i][1].v - z.v) < tol)
                return i;
        nodes_.push_back({x, z});
        return static_cast<int>(nodes_.size()) - 1;
    }

  private:
    std::vector<std::array<DualReal, 2>>& nodes_;
};

// Straight edge from a to b split into k elements of degree p; returns the
// elements with shared interior endpoints merged through the node table.
std::vector<BoundaryElement> make_edge(NodeTable& table, const std::array<DualReal, 2>& a,
                                       const std::array<DualReal, 2>& b, int k,
                                       const LobattoBasis& basis) {
    std::vector<BoundaryElement> out;
    const int p = basis.degree;
    for (int e = 0; e < k; ++e) {
        BoundaryElement el;
        for (int i = 0; i <= p; ++i) {
            const double s = (e + (basis.nodes(i) + 1.0) / 2.0) / k;  // 0..1 along the edge
            const DualReal x = a[0] + s * (b[0] - a[0]);
            const DualReal z = a[1] + s * (b[1] - a[1]);
            el.nodes.push_back(table.insert(x, z));
        }
        out.push_back(std::move(el));
    }
    return out;
}

void append(std::vector<BoundaryElement>& chain, std::vector<BoundaryElement> part) {
    for (auto& e : part) chain.push_back(std::move(e));
}

bool depends_on_q(const SuperElement& se, const std::vector<std::array<DualReal, 2>>& nodes) {
    auto moving = [](const DualReal& a) { return a.d[0] != 0.0 || a.d[1] != 0.0; };
    if (se.kind == SuperElement::Kind::Waveguide)
        return moving(se.x_left) || moving(se.x_right);
    for (const auto& e : se.elements)
        for (int n : e.nodes)
            if (moving(nodes[n][0]) || moving(nodes[n][1])) return true;
    return moving(se.scaling_center[0]) || moving(se.scaling_center[1]);
}

}  // namespace

Mesh build_mesh(const PlateGeometry& geom, const NotchParams& q, const MeshConfig& config) {
    const double th = geom.thickness;
    if (!(q.q2 > 0.0) || q.q2 >= th)
        throw std::invalid_argument("build_mesh: notch depth outside (0, thickness)");
    const DualReal q1 = DualReal::seed(q.q1, 0);
    const DualReal q2 = DualReal::seed(q.q2, 1);
    const DualReal band_lo = q1 - geom.band_margin;
    const DualReal band_hi = q1 + geom.notch_width + geom.band_margin;
    if (band_lo.v <= geom.x_min || band_hi.v >= geom.x_max)
        throw std::invalid_argument("build_mesh: notch outside plate");
    if (band_lo.v <= geom.sensor_hi)
        throw std::invalid_argument("build_mesh: notch overlapping sensor region");
    double meas_max = geom.x_min;
    for (double x : geom.measurement_xs) meas_max = std::max(meas_max, x);
    if (band_lo.v <= meas_max)
        throw std::invalid_argument("build_mesh: notch band overlaps measurement region");

    Mesh mesh;
    mesh.config = config;
    NodeTable table(mesh.nodes);
    const LobattoBasis basis = lobatto_basis(config.degree);

    // Through-thickness node layout shared by every cross-section line.
    for (int e = 0; e < config.n_thick; ++e) {
        const double zlo = -th + e * th / config.n_thick;
        const double zhi = -th + (e + 1) * th / config.n_thick;
        for (int i = (e == 0 ? 0 : 1); i <= config.degree; ++i)
            mesh.cross_section_z.push_back(zlo + (basis.nodes(i) + 1.0) / 2.0 * (zhi - zlo));
    }

    // Cross-section line positions, ascending.
    std::vector<DualReal> lines;
    lines.emplace_back(geom.x_min);
    lines.emplace_back(geom.sensor_lo);
    lines.emplace_back(geom.sensor_hi);
    for (double x : geom.measurement_xs) lines.emplace_back(x);
    lines.push_back(band_lo);
    lines.push_back(band_hi);
    lines.emplace_back(geom.x_max);
    std::sort(lines.begin(), lines.end(),
              [](const DualReal& a, const DualReal& b) { return a.v < b.v; });

    auto make_line = [&](const DualReal& x) {
        std::vector<int> ids;
        for (double z : mesh.cross_section_z) ids.push_back(table.insert(x, DualReal(z)));
        return ids;
    };
    std::vector<std::vector<int>> line_nodes;
    for (const auto& x : lines) line_nodes.push_back(make_line(x));

    auto is_close = [](double a, double b) { return std::abs(a - b) < 1e-9; };

    // Waveguide super-elements between consecutive lines, except across the
    // sensor box and the notch band (polygon territory).
    for (size_t i = 0; i + 1 < lines.size(); ++i) {
        const double xl = lines[i].v, xr = lines[i + 1].v;
        if (is_close(xl, geom.sensor_lo) && is_close(xr, geom.sensor_hi)) continue;
        if (is_close(xl, band_lo.v) && is_close(xr, band_hi.v)) continue;
        SuperElement se;
        se.kind = SuperElement::Kind::Waveguide;
        se.x_left = lines[i];
        se.x_right = lines[i + 1];
        se.left_nodes = line_nodes[i];
        se.right_nodes = line_nodes[i + 1];
        std::ostringstream name;
        name << "wg[" << xl * 1e3 << "," << xr * 1e3 << "]";
        se.name = name.str();
        mesh.super_elements.push_back(std::move(se));
    }

    using P = std::array<DualReal, 2>;

    // Sensor box polygon: closed boundary, counterclockwise, so that the
    // sensor traction span lies on meshed boundary elements.
    {
        SuperElement se;
        se.kind = SuperElement::Kind::Polygon;
        se.closed = true;
        se.name = "sensor_box";
        const P bl{DualReal(geom.sensor_lo), DualReal(-th)};
        const P br{DualReal(geom.sensor_hi), DualReal(-th)};
        const P tr{DualReal(geom.sensor_hi), DualReal(0.0)};
        const P tl{DualReal(geom.sensor_lo), DualReal(0.0)};
        append(se.elements, make_edge(table, bl, br, config.sensor_top, basis));
        append(se.elements, make_edge(table, br, tr, config.n_thick, basis));
        append(se.elements, make_edge(table, tr, tl, config.sensor_top, basis));
        append(se.elements, make_edge(table, tl, bl, config.n_thick, basis));
        se.scaling_center = {DualReal(0.5 * (geom.sensor_lo + geom.sensor_hi)),
                             DualReal(-0.5 * th)};
        mesh.super_elements.push_back(std::move(se));
    }

    // Notch band polygons; scaling centers sit at the notch root corners so
    // the notch flanks and notch bottom are un-meshed radial side faces.
    const DualReal x_mid = q1 + 0.5 * geom.notch_width;
    const DualReal notch_z = DualReal(0.0) - q2;
    {
        SuperElement se;
        se.kind = SuperElement::Kind::Polygon;
        se.name = "notch_left";
        const P e_top{q1, DualReal(0.0)};
        const P a{band_lo, DualReal(0.0)};
        const P b{band_lo, DualReal(-th)};
        const P c{x_mid, DualReal(-th)};
        const P d{x_mid, notch_z};
        append(se.elements, make_edge(table, e_top, a, config.band_top, basis));
        append(se.elements, make_edge(table, a, b, config.n_thick, basis));
        append(se.elements, make_edge(table, b, c, config.band_bottom, basis));
        append(se.elements, make_edge(table, c, d, config.band_divider, basis));
        se.scaling_center = {q1, notch_z};
        mesh.super_elements.push_back(std::move(se));
    }
    {
        SuperElement se;
        se.kind = SuperElement::Kind::Polygon;
        se.name = "notch_right";
        const DualReal flank_x = q1 + geom.notch_width;
        const P d{x_mid, notch_z};
        const P i_bot{x_mid, DualReal(-th)};
        const P h{band_hi, DualReal(-th)};
        const P g{band_hi, DualReal(0.0)};
        const P f{flank_x, DualReal(0.0)};
        append(se.elements, make_edge(table, d, i_bot, config.band_divider, basis));
        append(se.elements, make_edge(table, i_bot, h, config.band_bottom, basis));
        append(se.elements, make_edge(table, h, g, config.n_thick, basis));
        append(se.elements, make_edge(table, g, f, config.band_top, basis));
        se.scaling_center = {flank_x, notch_z};
        mesh.super_elements.push_back(std::move(se));
    }

    for (auto& se : mesh.super_elements) se.param_dependent = depends_on_q(se, mesh.nodes);
    return mesh;
}

bool star_convex(const Mesh& mesh) {
    const LobattoBasis basis = lobatto_basis(mesh.config.degree);
    const GaussRule rule = gauss_rule(mesh.config.degree + 2);
    for (const auto& se : mesh.super_elements) {
        if (se.kind != SuperElement::Kind::Polygon) continue;
        for (const auto& el : se.elements) {
            for (int g = 0; g < rule.points.size(); ++g) {
                const Eigen::VectorXd N = basis.shape(rule.points(g));
                const Eigen::VectorXd dN = basis.shape_deriv(rule.points(g));
                double xb = 0, zb = 0, dxb = 0, dzb = 0;
                for (size_t i = 0; i < el.nodes.size(); ++i) {
                    xb += N(i) * (mesh.nodes[el.nodes[i]][0].v - se.scaling_center[0].v);
                    zb += N(i) * (mesh.nodes[el.nodes[i]][1].v - se.scaling_center[1].v);
                    dxb += dN(i) * mesh.nodes[el.nodes[i]][0].v;
                    dzb += dN(i) * mesh.nodes[el.nodes[i]][1].v;
                }
                if (xb * dzb - zb * dxb <= 0.0) return false;
            }
        }
    }
    return true;
}

std::string Mesh::dump() const {
    std::ostringstream os;
    os.precision(12);
    os << "mesh degree " << config.degree << " nodes " << n_nodes() << "\n";
    for (int i = 0; i < n_nodes(); ++i)
        os << "node " << i << " " << nodes[i][0].v << " " << nodes[i][1].v << "\n";
    for (const auto& se : super_elements) {
        if (se.kind == SuperElement::Kind::Waveguide) {
            os << "waveguide " << se.name << " L " << se.length().v << " left";
            for (int n : se.left_nodes) os << " " << n;
            os << " right";
            for (int n : se.right_nodes) os << " " << n;
            os << "\n";
        } else {
            os << "polygon " << se.name << " center " << se.scaling_center[0].v << " "
               << se.scaling_center[1].v << "\n";
            for (const auto& el : se.elements) {
                os << "  element";
                for (int n : el.nodes) os << " " << n;
                os << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace notchscan
