#include "notchscan.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>

#include "core/container.hpp"
#include "core/forward.hpp"
#include "core/inverse.hpp"
#include "core/selftest.hpp"
#include "core/waveguide.hpp"

using namespace notchscan;

namespace {

thread_local std::string g_last_error;

ns_status fail(ns_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <typename F>
ns_status guarded(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        return fail(NS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::runtime_error& e) {
        return fail(NS_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(NS_ERR_INTERNAL, e.what());
    }
}

const TimeGrid kDefaultGrid{782, 0.2e-6, 0.0};

}  // namespace

struct ns_model {
    ForwardContext ctx;
};

extern "C" {

const char* ns_last_error(void) { return g_last_error.c_str(); }

ns_status ns_model_from_measurement(const char* path, ns_model** out) {
    if (!path || !out) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        MeasurementSet meas;
        try {
            meas = read_container(path);
        } catch (const std::runtime_error& e) {
            return fail(NS_ERR_IO, e.what());
        }
        auto m = std::make_unique<ns_model>();
        m->ctx = make_forward_context(ModelConfig{}, meas);
        *out = m.release();
        return NS_OK;
    });
}

ns_status ns_model_synthetic(double q1, double q2, double noise_rms_fraction,
                             unsigned long long seed, ns_model** out) {
    if (!out) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        const ModelConfig cfg;
        const MeasurementContainer c =
            synth_measurement({q1, q2}, cfg, noise_rms_fraction, seed, kDefaultGrid);
        Array4 raw(c.n_components, c.n_x, c.n_y, c.n_t);
        for (std::size_t i = 0; i < c.payload.size(); ++i)
            raw.data(static_cast<std::ptrdiff_t>(i)) = c.payload[i];
        MeasurementSet meas{TimeGrid{c.n_t, c.dt, c.t0}, nrm(mean_y(raw))};
        auto m = std::make_unique<ns_model>();
        m->ctx = make_forward_context(cfg, meas);
        *out = m.release();
        return NS_OK;
    });
}

void ns_model_free(ns_model* m) { delete m; }

ns_status ns_model_shape(const ns_model* m, int* nc, int* nx, int* nt, double* dt,
                         double* t0) {
    if (!m) return fail(NS_ERR_INVALID_ARGUMENT, "null model");
    if (nc) *nc = 2;
    if (nx) *nx = static_cast<int>(m->ctx.cfg.geom.measurement_xs.size());
    if (nt) *nt = m->ctx.grid.n_samples;
    if (dt) *dt = m->ctx.grid.dt;
    if (t0) *t0 = m->ctx.grid.t0;
    return NS_OK;
}

ns_status ns_measurement_xs(const ns_model* m, double* xs) {
    if (!m || !xs) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    const auto& v = m->ctx.cfg.geom.measurement_xs;
    std::memcpy(xs, v.data(), v.size() * sizeof(double));
    return NS_OK;
}

ns_status ns_objective(const ns_model* m, double q1, double q2, double* value) {
    if (!m || !value) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *value = objective(m->ctx, {q1, q2});
        return NS_OK;
    });
}

ns_status ns_forward_traces(const ns_model* m, double q1, double q2, double* out) {
    if (!m || !out) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const ForwardOutput fo = forward(m->ctx, {q1, q2}, false);
        std::memcpy(out, fo.v_sim.data.data(), fo.v_sim.data.size() * sizeof(double));
        return NS_OK;
    });
}

ns_status ns_reconstruct(const ns_model* m, const double box[4], int starts,
                         unsigned long long seed, double alpha0, double eps, int max_iter,
                         ns_recon_result* out, double* trajectory, int traj_capacity,
                         int* traj_len) {
    if (!m || !box || !out) return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    if (box[0] >= box[1] || box[2] >= box[3])
        return fail(NS_ERR_INVALID_ARGUMENT, "parameter box must have lo < hi");
    return guarded([&] {
        ParameterBox pbox;
        pbox.lo = Eigen::Vector2d(box[0], box[2]);
        pbox.hi = Eigen::Vector2d(box[1], box[3]);
        InverseConfig cfg;
        cfg.starts = starts;
        cfg.eps = eps;
        if (max_iter > 0) cfg.n_max = max_iter;
        if (alpha0 > 0.0) {
            double a = alpha0;
            for (int n = 0; n <= cfg.n_max; ++n, a *= 2.0 / 3.0) cfg.alphas.push_back(a);
        }
        const ReconstructionResult r = reconstruct(m->ctx, pbox, seed, cfg);
        out->q1 = r.q_min.q1;
        out->q2 = r.q_min.q2;
        out->iterations = r.iterations;
        out->converged = r.converged ? 1 : 0;
        out->regularization_fallbacks = r.regularization_fallbacks;
        const int n = static_cast<int>(r.trajectory.size());
        if (traj_len) *traj_len = trajectory ? std::min(n, traj_capacity) : n;
        if (trajectory) {
            for (int i = 0; i < std::min(n, traj_capacity); ++i) {
                trajectory[3 * i + 0] = r.trajectory[i].first.q1;
                trajectory[3 * i + 1] = r.trajectory[i].first.q2;
                trajectory[3 * i + 2] = r.trajectory[i].second;
            }
        }
        return NS_OK;
    });
}

ns_status ns_dispersion(const double* freqs_hz, int n_freqs, double* out,
                        int capacity_rows, int* n_rows) {
    if (!freqs_hz || n_freqs < 1 || !out || !n_rows)
        return fail(NS_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const ModelConfig cfg;
        const Mesh mesh = build_mesh(cfg.geom, {0.0, 0.6e-3}, cfg.mesh);
        const CrossSectionMatrices cs = waveguide_matrices(
            mesh.cross_section_z, cfg.mesh.degree, cfg.mesh.n_thick, cfg.material);
        const std::vector<double> freqs(freqs_hz, freqs_hz + n_freqs);
        const std::vector<DispersionPoint> pts =
            dispersion_curves(cs, mesh.cross_section_z, freqs);
        *n_rows = std::min<int>(static_cast<int>(pts.size()), capacity_rows);
        for (int i = 0; i < *n_rows; ++i) {
            out[6 * i + 0] = pts[i].frequency;
            out[6 * i + 1] = pts[i].family == 'A' ? 1.0 : 0.0;
            out[6 * i + 2] = pts[i].order;
            out[6 * i + 3] = pts[i].wavelength;
            out[6 * i + 4] = pts[i].re_k;
            out[6 * i + 5] = pts[i].im_k;
        }
        return NS_OK;
    });
}

ns_status ns_synth_container(double q1, double q2, double noise_rms_fraction,
                             unsigned long long seed, const char* path) {
    if (!path) return fail(NS_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] {
        const MeasurementContainer c =
            synth_measurement({q1, q2}, ModelConfig{}, noise_rms_fraction, seed, kDefaultGrid);
        try {
            write_container(path, c);
        } catch (const std::runtime_error& e) {
            return fail(NS_ERR_IO, e.what());
        }
        return NS_OK;
    });
}

int ns_selftest(char* log, int log_capacity) {
    std::string text;
    int rc;
    try {
        rc = run_selftest(text);
    } catch (const std::exception& e) {
        text = std::string("FAIL exception: ") + e.what() + "\n";
        rc = 1;
    }
    if (log && log_capacity > 0) {
        const int n = std::min<int>(log_capacity - 1, static_cast<int>(text.size()));
        std::memcpy(log, text.data(), n);
        log[n] = '\0';
    }
    return rc;
}

}  // extern "C"
