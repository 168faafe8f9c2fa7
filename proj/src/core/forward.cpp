#include "core/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace notchscan {

namespace {

using Complexd = std::complex<double>;

constexpr double kGeomTol = 1e-9;

bool is_left_super(const Mesh& mesh, const SuperElement& se, double xi) {
    if (se.kind == SuperElement::Kind::Waveguide) return se.x_right.v <= xi + kGeomTol;
    for (int n : se.chain_nodes())
        if (mesh.nodes[n][0].v > xi + kGeomTol) return false;
    return true;
}

/// Local dof numbering over a subset of super-elements: the interface line at
/// x = xi comes first (nodes by ascending z), the remaining dofs follow in
/// global order.
struct DofMap {
    std::vector<int> local_dof;  ///< local -> global dof
    std::vector<int> to_local;   ///< global dof -> local (-1 outside)
    int nb = 0;                  ///< interface dof count

    int size() const { return static_cast<int>(local_dof.size()); }
};

DofMap make_dof_map(const Mesh& mesh, const std::vector<int>& super_ids, double xi) {
    DofMap map;
    map.to_local.assign(mesh.n_dof(), -1);
    std::vector<int> iface_nodes;
    for (double z : mesh.cross_section_z) {
        const int n = mesh.node_at(xi, z);
        if (n < 0) throw std::runtime_error("forward: interface line missing from mesh");
        iface_nodes.push_back(n);
    }
    for (int n : iface_nodes)
        for (int c = 0; c < 2; ++c) {
            map.to_local[2 * n + c] = map.size();
            map.local_dof.push_back(2 * n + c);
        }
    map.nb = map.size();

    std::vector<int> rest;
    for (int id : super_ids) {
        const auto& se = mesh.super_elements[id];
        std::vector<int> nodes;
        if (se.kind == SuperElement::Kind::Waveguide) {
            nodes = se.left_nodes;
            nodes.insert(nodes.end(), se.right_nodes.begin(), se.right_nodes.end());
        } else {
            nodes = se.chain_nodes();
        }
        for (int n : nodes)
            for (int c = 0; c < 2; ++c)
                if (map.to_local[2 * n + c] == -1) {
                    map.to_local[2 * n + c] = -2;  // mark, number later in global order
                    rest.push_back(2 * n + c);
                }
    }
    std::sort(rest.begin(), rest.end());
    for (int dof : rest) {
        map.to_local[dof] = map.size();
        map.local_dof.push_back(dof);
    }
    return map;
}

void scatter_value(Eigen::MatrixXcd& S, const Eigen::MatrixXcd& local,
                   const std::vector<int>& nodes, const DofMap& map) {
    const int nn = static_cast<int>(nodes.size());
    for (int a = 0; a < nn; ++a)
        for (int ca = 0; ca < 2; ++ca) {
            const int gi = map.to_local[2 * nodes[a] + ca];
            for (int b = 0; b < nn; ++b)
                for (int cb = 0; cb < 2; ++cb)
                    S(gi, map.to_local[2 * nodes[b] + cb]) += local(2 * a + ca, 2 * b + cb);
        }
}

void scatter_dual(ZMat& S, const ZMat& local, const std::vector<int>& nodes, const DofMap& map,
                  bool with_sens) {
    const int nn = static_cast<int>(nodes.size());
    for (int a = 0; a < nn; ++a)
        for (int ca = 0; ca < 2; ++ca) {
            const int gi = map.to_local[2 * nodes[a] + ca];
            for (int b = 0; b < nn; ++b)
                for (int cb = 0; cb < 2; ++cb) {
                    const int gj = map.to_local[2 * nodes[b] + cb];
                    S.v(gi, gj) += local.v(2 * a + ca, 2 * b + cb);
                    if (with_sens) {
                        S.d0(gi, gj) += local.d0(2 * a + ca, 2 * b + cb);
                        S.d1(gi, gj) += local.d1(2 * a + ca, 2 * b + cb);
                    }
                }
        }
}

std::vector<int> waveguide_nodes(const SuperElement& se) {
    std::vector<int> nodes = se.left_nodes;
    nodes.insert(nodes.end(), se.right_nodes.begin(), se.right_nodes.end());
    return nodes;
}

}  // namespace

ForwardContext make_forward_context(const ModelConfig& cfg, const TimeGrid& grid) {
    ForwardContext ctx;
    ctx.cfg = cfg;
    ctx.grid = grid;
    ctx.fgrid = make_frequency_grid(grid, cfg.f_min, cfg.f_max);

    // The condensed region never depends on q; any admissible q gives the
    // same left-of-interface mesh.
    const Mesh ref = build_mesh(cfg.geom, NotchParams{0.0, 0.6e-3}, cfg.mesh);
    ctx.cs = waveguide_matrices(ref.cross_section_z, cfg.mesh.degree, cfg.mesh.n_thick,
                                cfg.material);
    ctx.x_interface = *std::max_element(cfg.geom.measurement_xs.begin(),
                                        cfg.geom.measurement_xs.end());

    std::vector<int> left_ids;
    for (size_t i = 0; i < ref.super_elements.size(); ++i)
        if (is_left_super(ref, ref.super_elements[i], ctx.x_interface))
            left_ids.push_back(static_cast<int>(i));
    const DofMap map = make_dof_map(ref, left_ids, ctx.x_interface);
    ctx.n_interface = map.nb;
    const int nb = map.nb, ni = map.size() - nb;

    // Sensor-box continued fraction (the only left polygon).
    ContinuedFraction sensor_cf;
    std::vector<int> sensor_chain;
    for (int id : left_ids) {
        const auto& se = ref.super_elements[id];
        if (se.kind != SuperElement::Kind::Polygon) continue;
        const PolygonMatrices pm = polygon_matrices(ref, se, cfg.material);
        sensor_cf = continued_fraction_setup(pm, cfg.mesh.cf_order);
        sensor_chain = pm.chain;
    }

    // Loads and measurement rows in local numbering.
    const Eigen::MatrixXd F_ref = assemble_tractions(ref, cfg.geom);
    Eigen::MatrixXd F_loc = Eigen::MatrixXd::Zero(map.size(), 2);
    for (int i = 0; i < map.size(); ++i) F_loc.row(i) = F_ref.row(map.local_dof[i]);
    std::vector<int> meas_local;
    for (int dof : measurement_dofs(ref, cfg.geom)) {
        const int li = map.to_local[dof];
        if (li < 0) throw std::runtime_error("forward: measurement dof outside left region");
        meas_local.push_back(li);
    }
    const int n_meas = static_cast<int>(meas_local.size());

    ctx.modes.reserve(ctx.fgrid.band_size());
    ctx.left.reserve(ctx.fgrid.band_size());
    for (int l = 0; l < ctx.fgrid.band_size(); ++l) {
        const Complexd omega = ctx.fgrid.omega(ctx.fgrid.band_lo + l);
        ctx.modes.push_back(solve_modes(ctx.cs, omega));

        Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(map.size(), map.size());
        for (int id : left_ids) {
            const auto& se = ref.super_elements[id];
            if (se.kind == SuperElement::Kind::Waveguide)
                scatter_value(S, waveguide_stiffness(ctx.modes.back(), se.length()).v,
                              waveguide_nodes(se), map);
            else
                scatter_value(S, sensor_cf.evaluate(omega), sensor_chain, map);
        }

        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S.bottomRightCorner(ni, ni));
        const Eigen::MatrixXcd Yf = lu.solve(F_loc.bottomRows(ni).cast<Complexd>());
        const Eigen::MatrixXcd Ys = lu.solve(S.bottomLeftCorner(ni, nb));
        if (!Yf.allFinite() || !Ys.allFinite())
            throw std::runtime_error("forward: left-region condensation failed");

        ForwardContext::LeftBlock blk;
        blk.S_cond = S.topLeftCorner(nb, nb) - S.topRightCorner(nb, ni) * Ys;
        blk.f_cond = F_loc.topRows(nb).cast<Complexd>() - S.topRightCorner(nb, ni) * Yf;
        blk.r0 = Eigen::MatrixXcd::Zero(n_meas, 2);
        blk.R = Eigen::MatrixXcd::Zero(n_meas, nb);
        for (int m = 0; m < n_meas; ++m) {
            if (meas_local[m] < nb) {
                blk.R(m, meas_local[m]) = 1.0;
            } else {
                blk.r0.row(m) = Yf.row(meas_local[m] - nb);
                blk.R.row(m) = -Ys.row(meas_local[m] - nb);
            }
        }
        ctx.left.push_back(std::move(blk));
    }
    return ctx;
}

void attach_measurement(ForwardContext& ctx, const MeasurementSet& meas) {
    const int nx = static_cast<int>(ctx.cfg.geom.measurement_xs.size());
    if (meas.v.nc != 2 || meas.v.nx != nx || meas.v.ny != 1 ||
        meas.v.nt != ctx.grid.n_samples || meas.grid.n_samples != ctx.grid.n_samples ||
        meas.grid.dt != ctx.grid.dt)
        throw std::invalid_argument("attach_measurement: measurement shape mismatch");
    ctx.y_meas = vec_env(meas.v);
    const TraceMatrix traces = meas.v.traces();
    const CTraceMatrix spec = dlt(traces, meas.grid, ctx.fgrid.zeta);
    ctx.vhat_meas = spec.middleCols(ctx.fgrid.band_lo, ctx.fgrid.band_size());
}

ForwardContext make_forward_context(const ModelConfig& cfg, const MeasurementSet& meas) {
    ForwardContext ctx = make_forward_context(cfg, meas.grid);
    attach_measurement(ctx, meas);
    return ctx;
}

Eigen::Vector2cd transfer_fit(const Eigen::MatrixXcd& V, const Eigen::VectorXcd& v,
                              double beta) {
    const Eigen::Matrix2cd G =
        V.adjoint() * V + beta * Eigen::Matrix2cd::Identity();
    return G.lu().solve(V.adjoint() * v);
}

namespace {

/// Parameter-dependent half of the model: the mesh right of the interface,
/// its dof map, and the notch continued fractions.
struct RightSystem {
    Mesh mesh;
    std::vector<int> right_ids;
    DofMap map;
    struct PolyData {
        ContinuedFraction cf;
        std::vector<int> chain;
    };
    std::vector<PolyData> polys;
};

RightSystem build_right_system(const ForwardContext& ctx, const NotchParams& q,
                              bool with_sensitivities) {
    RightSystem rs;
    rs.mesh = build_mesh(ctx.cfg.geom, q, ctx.cfg.mesh);
    for (size_t i = 0; i < rs.mesh.super_elements.size(); ++i)
        if (!is_left_super(rs.mesh, rs.mesh.super_elements[i], ctx.x_interface))
            rs.right_ids.push_back(static_cast<int>(i));
    rs.map = make_dof_map(rs.mesh, rs.right_ids, ctx.x_interface);
    if (rs.map.nb != ctx.n_interface)
        throw std::runtime_error("forward: interface dof mismatch against the cached context");
    for (int id : rs.right_ids) {
        const auto& se = rs.mesh.super_elements[id];
        if (se.kind != SuperElement::Kind::Polygon) continue;
        const PolygonMatrices pm = polygon_matrices(rs.mesh, se, ctx.cfg.material);
        rs.polys.push_back({continued_fraction_setup(pm, ctx.cfg.mesh.cf_order, with_sensitivities),
                            pm.chain});
    }
    return rs;
}

/// Measurement-dof velocity responses V_hat = i omega u_meas (n_meas x 2) at
/// band index l, optionally with the two q-derivatives.
void response_at(const ForwardContext& ctx, const RightSystem& rs, int l, bool with_derivs,
                 Eigen::MatrixXcd& Vhat, Eigen::MatrixXcd* dV0, Eigen::MatrixXcd* dV1) {
    const int bin = ctx.fgrid.band_lo + l;
    const Complexd omega = ctx.fgrid.omega(bin);
    const Complexd iw(0.0, 1.0);
    const ForwardContext::LeftBlock& blk = ctx.left[l];
    const int nb = rs.map.nb, nr = rs.map.size();

    ZMat S(nr, nr);
    size_t poly_idx = 0;
    for (int id : rs.right_ids) {
        const auto& se = rs.mesh.super_elements[id];
        if (se.kind == SuperElement::Kind::Waveguide) {
            scatter_dual(S, waveguide_stiffness(ctx.modes[l], se.length()),
                         waveguide_nodes(se), rs.map, with_derivs);
        } else {
            const RightSystem::PolyData& pd = rs.polys[poly_idx++];
            if (with_derivs) {
                scatter_dual(S, pd.cf.evaluate_dual(omega), pd.chain, rs.map, true);
            } else {
                ZMat local;
                local.v = pd.cf.evaluate(omega);
                scatter_dual(S, local, pd.chain, rs.map, false);
            }
        }
    }
    S.v.topLeftCorner(nb, nb) += blk.S_cond;

    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(nr, 2);
    B.topRows(nb) = blk.f_cond;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S.v);
    const Eigen::MatrixXcd U = lu.solve(B);
    if (!U.allFinite())
        throw std::runtime_error("forward: singular system at band index " +
                                 std::to_string(bin));
    Vhat = iw * omega * (blk.r0 + blk.R * U.topRows(nb));
    if (with_derivs) {
        for (int k = 0; k < 2; ++k) {
            const Eigen::MatrixXcd& dS = k == 0 ? S.d0 : S.d1;
            const Eigen::MatrixXcd dU = lu.solve((-(dS * U)).eval());
            *(k == 0 ? dV0 : dV1) = iw * omega * (blk.R * dU.topRows(nb));
        }
    }
}

}  // namespace

std::vector<Eigen::MatrixXcd> unit_responses(const ForwardContext& ctx, const NotchParams& q) {
    const RightSystem rs = build_right_system(ctx, q, false);
    std::vector<Eigen::MatrixXcd> out(ctx.fgrid.band_size());
    for (int l = 0; l < ctx.fgrid.band_size(); ++l)
        response_at(ctx, rs, l, false, out[l], nullptr, nullptr);
    return out;
}

ForwardOutput forward(const ForwardContext& ctx, const NotchParams& q, bool with_jacobian) {
    if (!ctx.has_measurement())
        throw std::runtime_error("forward: no measurement attached to the context");
    const ModelConfig& cfg = ctx.cfg;
    const RightSystem rs = build_right_system(ctx, q, with_jacobian);

    const int nt = ctx.grid.n_samples;
    const int n_meas = static_cast<int>(ctx.vhat_meas.rows());
    CTraceMatrix spectra = CTraceMatrix::Zero(n_meas, nt);
    CTraceMatrix dspec0, dspec1;
    if (with_jacobian) {
        dspec0 = CTraceMatrix::Zero(n_meas, nt);
        dspec1 = CTraceMatrix::Zero(n_meas, nt);
    }
    ForwardOutput out;
    out.h.resize(2, ctx.fgrid.band_size());

    for (int l = 0; l < ctx.fgrid.band_size(); ++l) {
        const int bin = ctx.fgrid.band_lo + l;
        Eigen::MatrixXcd Vhat, dV0, dV1;
        response_at(ctx, rs, l, with_jacobian, Vhat, &dV0, &dV1);

        const Eigen::VectorXcd vm = ctx.vhat_meas.col(l);
        // beta acts relative to the normal-matrix scale so that "small
        // regularization" keeps its meaning regardless of the velocity units.
        const double bscale = 0.5 * Vhat.squaredNorm();
        const double beta = cfg.beta * bscale;
        const Eigen::Vector2cd h = transfer_fit(Vhat, vm, beta);
        out.h.col(l) = h;
        spectra.col(bin) = Vhat * h;

        if (with_jacobian) {
            const Eigen::Matrix2cd G =
                Vhat.adjoint() * Vhat + beta * Eigen::Matrix2cd::Identity();
            const Eigen::PartialPivLU<Eigen::Matrix2cd> glu(G);
            for (int k = 0; k < 2; ++k) {
                const Eigen::MatrixXcd& dVhat = k == 0 ? dV0 : dV1;
                const double dbeta =
                    cfg.beta * Vhat.cwiseProduct(dVhat.conjugate()).sum().real();
                const Eigen::Vector2cd dh = glu.solve(
                    dVhat.adjoint() * vm -
                    (dVhat.adjoint() * Vhat + Vhat.adjoint() * dVhat) * h - dbeta * h);
                (k == 0 ? dspec0 : dspec1).col(bin) = dVhat * h + Vhat * dh;
            }
        }
    }

    conjugate_symmetrize(spectra, ctx.fgrid.band_lo, ctx.fgrid.band_hi);
    const TraceMatrix traces = idlt(spectra, ctx.grid, ctx.fgrid.zeta).real();

    out.v_sim = Array4(2, static_cast<int>(cfg.geom.measurement_xs.size()), 1, nt);
    out.v_sim.traces() = traces;
    const CTraceMatrix a = analytic_signal(traces);
    const TraceMatrix env = a.cwiseAbs();
    out.y = Eigen::Map<const Eigen::VectorXd>(env.data(), env.size());

    if (with_jacobian) {
        out.jacobian.resize(env.size(), 2);
        const double floor = 1e-14 * env.maxCoeff();
        for (int k = 0; k < 2; ++k) {
            CTraceMatrix& dspec = k == 0 ? dspec0 : dspec1;
            conjugate_symmetrize(dspec, ctx.fgrid.band_lo, ctx.fgrid.band_hi);
            const TraceMatrix dtr = idlt(dspec, ctx.grid, ctx.fgrid.zeta).real();
            const CTraceMatrix da = analytic_signal(dtr);
            for (Eigen::Index r = 0; r < env.rows(); ++r)
                for (int t = 0; t < nt; ++t)
                    out.jacobian(r * nt + t, k) =
                        env(r, t) > floor
                            ? std::real(std::conj(a(r, t)) * da(r, t)) / env(r, t)
                            : 0.0;
        }
    }
    return out;
}

double objective(const ForwardContext& ctx, const NotchParams& q) {
    return (forward(ctx, q, false).y - ctx.y_meas).squaredNorm();
}

}  // namespace notchscan
