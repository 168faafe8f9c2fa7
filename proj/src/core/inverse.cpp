#include "core/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace notchscan {

namespace {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

NotchParams project(const ParameterBox& box, const Eigen::Vector2d& q) {
    return {std::clamp(q(0), box.lo(0), box.hi(0)), std::clamp(q(1), box.lo(1), box.hi(1))};
}

/// All seeded samples with their objectives, ordered by ascending objective;
/// failed samples are skipped. Throws if every sample fails.
std::vector<std::pair<NotchParams, double>> sample_box(const ForwardContext& ctx,
                                                       const ParameterBox& box, int n,
                                                       std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("multistart: need at least one sample");
    if (!ctx.has_measurement()) throw std::logic_error("multistart: no measurement attached");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<NotchParams, double>> samples;
    for (int i = 0; i < n; ++i) {
        const NotchParams q{box.lo(0) + (box.hi(0) - box.lo(0)) * uniform01(rng),
                            box.lo(1) + (box.hi(1) - box.lo(1)) * uniform01(rng)};
        try {
            const double j = objective(ctx, q);
            if (std::isfinite(j)) samples.push_back({q, j});
        } catch (const std::exception&) {
            // a failed sample is skipped; only all of them failing is an error
        }
    }
    if (samples.empty()) throw std::runtime_error("multistart: all samples failed");
    std::stable_sort(samples.begin(), samples.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return samples;
}

}  // namespace

NotchParams multistart(const ForwardContext& ctx, const ParameterBox& box, int n,
                       std::uint64_t seed) {
    return sample_box(ctx, box, n, seed).front().first;
}

Eigen::MatrixXd jacobian(const ForwardContext& ctx, const NotchParams& q) {
    return forward(ctx, q, true).jacobian;
}

ReconstructionResult irgnm(const NotchParams& q0, const ForwardMap& F,
                           const Eigen::VectorXd& y_meas, const ParameterBox& box,
                           const std::vector<double>& alphas, double eps, int n_max) {
    if (!box.contains(q0)) throw std::invalid_argument("irgnm: start outside the parameter box");

    ReconstructionResult res;
    const Eigen::Vector2d v0(q0.q1, q0.q2);
    Eigen::Vector2d q = v0;

    for (int n = 0; n < n_max; ++n) {
        const LinearizedForward out = F({q(0), q(1)}, true);
        const Eigen::VectorXd r = y_meas - out.y;
        res.trajectory.push_back({{q(0), q(1)}, r.squaredNorm()});

        const double alpha =
            alphas.empty() ? 0.0 : alphas[std::min<std::size_t>(n, alphas.size() - 1)];
        Eigen::Matrix2d G = out.jacobian.transpose() * out.jacobian;
        Eigen::Vector2d rhs = out.jacobian.transpose() * r + alpha * (v0 - q);
        G.diagonal().array() += alpha;

        // A rank-deficient Gauss-Newton system with alpha = 0 gets a tiny
        // trace-scaled ridge for this one step.
        const double tr = G.trace();
        if (G.determinant() <= 1e-24 * tr * tr) {
            G.diagonal().array() += 1e-12 * tr;
            ++res.regularization_fallbacks;
            if (G.determinant() == 0.0)
                throw std::runtime_error("irgnm: normal matrix is identically zero");
        }

        const Eigen::Vector2d delta = G.inverse() * rhs;
        const NotchParams qn = project(box, q + delta);
        const Eigen::Vector2d step(qn.q1 - q(0), qn.q2 - q(1));
        q = Eigen::Vector2d(qn.q1, qn.q2);
        res.iterations = n + 1;
        if (step.norm() < eps) {
            res.converged = true;
            break;
        }
    }

    res.q_min = {q(0), q(1)};
    res.trajectory.push_back({res.q_min, (y_meas - F(res.q_min, false).y).squaredNorm()});
    return res;
}

ReconstructionResult irgnm(const NotchParams& q0, const ForwardContext& ctx,
                           const std::vector<double>& alphas, double eps, int n_max) {
    if (!ctx.has_measurement()) throw std::logic_error("irgnm: no measurement attached");
    const ForwardMap F = [&ctx](const NotchParams& q, bool with_jacobian) {
        ForwardOutput out = forward(ctx, q, with_jacobian);
        return LinearizedForward{std::move(out.y), std::move(out.jacobian)};
    };
    return irgnm(q0, F, ctx.y_meas, ParameterBox{}, alphas, eps, n_max);
}

ReconstructionResult reconstruct(const ForwardContext& ctx, const ParameterBox& box,
                                 std::uint64_t seed, const InverseConfig& cfg) {
    const auto samples = sample_box(ctx, box, cfg.starts, seed);

    // Best samples in objective order, but at most one per neighborhood: two
    // starts closer than 5 % of the box (scaled) would refine the same valley.
    std::vector<NotchParams> starts;
    const Eigen::Vector2d span = box.hi - box.lo;
    for (const auto& [q, j] : samples) {
        if (static_cast<int>(starts.size()) >= std::max(1, cfg.local_starts)) break;
        bool separated = true;
        for (const NotchParams& p : starts)
            separated = separated && std::hypot((q.q1 - p.q1) / span(0),
                                                (q.q2 - p.q2) / span(1)) >= 0.05;
        if (separated) starts.push_back(q);
    }

    ReconstructionResult best;
    bool have = false;
    for (const NotchParams& q0 : starts) {
        try {
            ReconstructionResult r = irgnm(q0, ctx, cfg.alphas, cfg.eps, cfg.n_max);
            if (!have || r.trajectory.back().second < best.trajectory.back().second) {
                best = std::move(r);
                have = true;
            }
            // a descent well below every sampled valley floor is conclusive
            if (best.trajectory.back().second < 0.5 * samples.front().second) break;
        } catch (const std::exception&) {
            // a diverged local run is dropped; only all of them failing is an error
        }
    }
    if (!have) throw std::runtime_error("reconstruct: every local refinement failed");
    return best;
}

}  // namespace notchscan
