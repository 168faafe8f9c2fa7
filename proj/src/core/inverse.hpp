#ifndef NOTCHSCAN_INVERSE_HPP
#define NOTCHSCAN_INVERSE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "core/forward.hpp"

namespace notchscan {

struct ReconstructionResult {
    NotchParams q_min;
    int iterations = 0;
    std::vector<std::pair<NotchParams, double>> trajectory;  ///< (q_n, objective)
    bool converged = false;
    int regularization_fallbacks = 0;  ///< steps where the singular fallback fired
};

struct InverseConfig {
    int starts = 100;
    int local_starts = 6;        ///< best mutually separated samples refined by IRGNM
    std::vector<double> alphas;  ///< nonincreasing; empty means alpha_n = 0
    double eps = 1e-7;           ///< m, stopping step norm
    int n_max = 50;
};

/// Best of n uniform samples of the objective over the box; seeded and
/// deterministic. Throws if every sample fails to evaluate.
NotchParams multistart(const ForwardContext& ctx, const ParameterBox& box, int n,
                       std::uint64_t seed);

/// Directional derivatives of the simulated envelope vector, N_meas x 2.
Eigen::MatrixXd jacobian(const ForwardContext& ctx, const NotchParams& q);

/// Forward map for the Gauss-Newton iteration: value y and, when requested,
/// the N x 2 Jacobian at q.
struct LinearizedForward {
    Eigen::VectorXd y;
    Eigen::MatrixXd jacobian;
};
using ForwardMap = std::function<LinearizedForward(const NotchParams&, bool)>;

/// Iteratively regularized Gauss-Newton from q0:
/// q_{n+1} = q_n + (J^T J + alpha_n I)^-1 (J^T (y_meas - F(q_n)) + alpha_n (q_0 - q_n)),
/// iterates projected onto the box, stopping on step norm < eps or n_max.
ReconstructionResult irgnm(const NotchParams& q0, const ForwardMap& F,
                           const Eigen::VectorXd& y_meas, const ParameterBox& box,
                           const std::vector<double>& alphas, double eps, int n_max);

/// The same iteration on the physical forward operator and its measurement.
ReconstructionResult irgnm(const NotchParams& q0, const ForwardContext& ctx,
                           const std::vector<double>& alphas, double eps, int n_max);

/// Multistart followed by IRGNM: the objective is sampled at cfg.starts
/// seeded uniform points; the best cfg.local_starts samples that are mutually
/// separated (so one valley is not refined twice) seed Gauss-Newton runs in
/// objective order. A run that descends below half the best sampled objective
/// has clearly left the sampled valley floors and is accepted immediately;
/// otherwise the result with the lowest final objective wins.
ReconstructionResult reconstruct(const ForwardContext& ctx, const ParameterBox& box,
                                 std::uint64_t seed, const InverseConfig& cfg = {});

}  // namespace notchscan

#endif
