#include "core/selftest.hpp"

#include <random>
#include <sstream>

#include "core/forward.hpp"
#include "core/polygon.hpp"

namespace notchscan {

namespace {

bool check(std::ostringstream& log, const char* name, double value, double bound) {
    const bool ok = value < bound;
    log << (ok ? "ok   " : "FAIL ") << name << ": " << value << " (bound " << bound << ")\n";
    return ok;
}

double roundtrip_error() {
    const TimeGrid grid{782, 0.2e-6};
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (double zeta : {0.0, 0.5 * grid.domega(), 2.0 * grid.domega()}) {
        TraceMatrix x(4, grid.n_samples);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
        const TraceMatrix back = idlt(dlt(x, grid, zeta), grid, zeta).real();
        worst = std::max(worst, (back - x).norm() / x.norm());
    }
    return worst;
}

/// Self-consistent measurement from the model's own unit responses.
MeasurementSet model_measurement(const ForwardContext& ctx, const NotchParams& q) {
    const std::vector<Eigen::MatrixXcd> V = unit_responses(ctx, q);
    const Eigen::VectorXd s = excitation_signal(ctx.grid, ExcitationConfig{});
    const TraceMatrix srow = s.transpose();
    const CTraceMatrix shat = dlt(srow, ctx.grid, ctx.fgrid.zeta);
    CTraceMatrix spec = CTraceMatrix::Zero(V[0].rows(), ctx.grid.n_samples);
    for (int l = 0; l < ctx.fgrid.band_size(); ++l) {
        const int bin = ctx.fgrid.band_lo + l;
        spec.col(bin) = V[l] * (shat(0, bin) * Eigen::Vector2cd(1.0, 0.3));
    }
    conjugate_symmetrize(spec, ctx.fgrid.band_lo, ctx.fgrid.band_hi);
    const TraceMatrix tr = idlt(spec, ctx.grid, ctx.fgrid.zeta).real();
    Array4 arr(2, static_cast<int>(tr.rows()) / 2, 1, ctx.grid.n_samples);
    arr.traces() = tr;
    return {ctx.grid, nrm(arr)};
}

double gradient_error() {
    ForwardContext ctx = make_forward_context(ModelConfig{}, TimeGrid{782, 0.2e-6});
    attach_measurement(ctx, model_measurement(ctx, {0.0, 0.8e-3}));
    const NotchParams q{5e-3, 0.5e-3};
    const Eigen::MatrixXd J = forward(ctx, q, true).jacobian;
    const double h = 1e-7;  // 1e-4 mm central-difference step
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
        NotchParams qp = q, qm = q;
        (k == 0 ? qp.q1 : qp.q2) += h;
        (k == 0 ? qm.q1 : qm.q2) -= h;
        const Eigen::VectorXd fd =
            (forward(ctx, qp, false).y - forward(ctx, qm, false).y) / (2.0 * h);
        worst = std::max(worst, (J.col(k) - fd).norm() / fd.norm());
    }
    return worst;
}

struct RiccatiErrors {
    double seed, sensitivity;
};

RiccatiErrors riccati_errors() {
    const ModelConfig cfg;
    const Mesh mesh = build_mesh(cfg.geom, {2e-3, 0.6e-3}, cfg.mesh);
    const SuperElement* poly = nullptr;
    for (const auto& se : mesh.super_elements)
        if (se.name == "notch_left") poly = &se;
    const PolygonMatrices pm = polygon_matrices(mesh, *poly, cfg.material);
    const ContinuedFraction cf = continued_fraction_setup(pm, cfg.mesh.cf_order);
    const Eigen::MatrixXd& S0 = cf.levels[0].S0.v;
    const Eigen::MatrixXd& dS0 = cf.levels[0].S0.d1;

    const Eigen::MatrixXd E0i =
        pm.E0.v.partialPivLu().solve(Eigen::MatrixXd::Identity(S0.rows(), S0.cols()));
    const Eigen::MatrixXd R = (S0 - pm.E1.v) * E0i * (S0 - pm.E1.v.transpose()) - pm.E2.v;
    const double seed = R.norm() / (pm.E2.v.norm() + S0.norm());

    const Eigen::MatrixXd A = (S0 - pm.E1.v) * E0i;
    const Eigen::MatrixXd dR = (dS0 - pm.E1.d1) * E0i * (S0 - pm.E1.v.transpose()) -
                               A * pm.E0.d1 * E0i * (S0 - pm.E1.v.transpose()) +
                               A * (dS0 - pm.E1.d1.transpose()) - pm.E2.d1;
    const double sens = dR.norm() / (pm.E2.d1.norm() + dS0.norm() * A.norm() + 1.0);
    return {seed, sens};
}

}  // namespace

int run_selftest(std::string& log) {
    std::ostringstream out;
    bool ok = true;
    try {
        ok &= check(out, "dlt round trip", roundtrip_error(), 1e-12);
        const RiccatiErrors r = riccati_errors();
        ok &= check(out, "riccati seed residual", r.seed, 1e-8);
        ok &= check(out, "riccati sensitivity residual", r.sensitivity, 1e-8);
        ok &= check(out, "jacobian vs finite differences", gradient_error(), 1e-4);
    } catch (const std::exception& e) {
        out << "FAIL exception: " << e.what() << "\n";
        ok = false;
    }
    log = out.str();
    return ok ? 0 : 1;
}

}  // namespace notchscan
