#include "core/polygon.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "core/sylvester.hpp"

namespace notchscan {

namespace {

using Complexd = std::complex<double>;

template <typename Scalar>
DMatT<Scalar> dinv(const DMatT<Scalar>& a) {
    using Mat = typename DMatT<Scalar>::Mat;
    const Mat inv = a.v.partialPivLu().solve(Mat::Identity(a.rows(), a.cols()));
    return {inv, -inv * a.d0 * inv, -inv * a.d1 * inv};
}

DMat symm(const DMat& a) {
    return {0.5 * (a.v + a.v.transpose()), 0.5 * (a.d0 + a.d0.transpose()),
            0.5 * (a.d1 + a.d1.transpose())};
}

Eigen::MatrixXcd ccast(const Eigen::MatrixXd& a) { return a.cast<Complexd>(); }

// Solves Lambda-shifted Lyapunov equations in the spectral basis of
// A^T = Phi Lambda Phi^-1: A Y + Y A^T + 2 s Y = R maps to entrywise division
// by (lambda_i + lambda_j + 2 s). Entries with vanishing denominator are
// zeroed; the seed equations provably have vanishing right-hand sides there.
struct SpectralBasis {
    Eigen::MatrixXcd phi, phi_inv;
    Eigen::VectorXcd lambda;
    double zero_tol = 0.0;

    Eigen::MatrixXd solve(const Eigen::MatrixXd& R, double shift) const {
        const Eigen::Index n = lambda.size();
        Eigen::MatrixXcd Rt = phi.transpose() * R * phi;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const Complexd den = lambda(i) + lambda(j) + 2.0 * shift;
                Rt(i, j) = std::abs(den) > zero_tol ? Rt(i, j) / den : Complexd(0.0);
            }
        return (phi_inv.transpose() * Rt * phi_inv).real();
    }
};

}  // namespace

ContinuedFraction continued_fraction_setup(const PolygonMatrices& pm, int cf_order,
                                           bool with_sensitivities) {
    if (cf_order < 1) throw std::invalid_argument("continued_fraction_setup: order must be >= 1");
    const int n = static_cast<int>(pm.E0.rows());
    ContinuedFraction cf;
    cf.n = n;
    cf.has_sensitivities = with_sensitivities;

    const DMat E0inv = dinv(pm.E0);
    const DMat E1t = pm.E1.transpose();

    // Hamiltonian of the static problem; modes [u; q] scale as xi^lambda and
    // the bounded branch has Re lambda >= 0. The force variable is rescaled by
    // the stiffness magnitude (a similarity transform) so that all blocks are
    // O(1); without it the eigensolve loses the small exponents entirely.
    const double c0 = pm.E0.v.norm();
    Eigen::MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = -E0inv.v * E1t.v;
    H.topRightCorner(n, n) = c0 * E0inv.v;
    H.bottomLeftCorner(n, n) = (pm.E2.v - pm.E1.v * E0inv.v * E1t.v) / c0;
    H.bottomRightCorner(n, n) = pm.E1.v * E0inv.v;
    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("continued_fraction_setup: Hamiltonian eigensolver failed");

    // The scaling exponents lambda come in +/- pairs. The zero exponent of the
    // two translations is numerically a cluster (with Jordan partners on the
    // unbounded branch), while the smallest genuine exponent is O(1), so an
    // absolute 0.1 tolerance separates the cluster cleanly. The bounded branch
    // is the n-2 largest-Re genuine modes plus the analytic translations.
    const double cluster_tol = 0.1;
    std::vector<int> genuine;
    int n_cluster = 0;
    for (int j = 0; j < 2 * n; ++j) {
        const Complexd lam = es.eigenvalues()(j);
        if (std::abs(lam) < cluster_tol)
            ++n_cluster;
        else if (lam.real() > 0.0)
            genuine.push_back(j);
    }
    if (n_cluster < 2 || static_cast<int>(genuine.size()) != n - 2)
        throw std::runtime_error("continued_fraction_setup: unexpected exponent spectrum");
    std::stable_sort(genuine.begin(), genuine.end(), [&](int a, int b) {
        return es.eigenvalues()(a).real() > es.eigenvalues()(b).real();
    });

    SpectralBasis basis;
    basis.lambda.resize(n);
    basis.phi.resize(n, n);
    basis.zero_tol = 1e-10;
    for (int j = 0; j < n - 2; ++j) {
        basis.lambda(j) = es.eigenvalues()(genuine[j]);
        Eigen::VectorXcd u = es.eigenvectors().col(genuine[j]).head(n);
        basis.phi.col(j) = u / u.norm();
    }
    for (int which = 0; which < 2; ++which) {
        Eigen::VectorXcd t = Eigen::VectorXcd::Zero(n);
        for (int i = which; i < n; i += 2) t(i) = 1.0;
        basis.lambda(n - 2 + which) = 0.0;
        basis.phi.col(n - 2 + which) = t / t.norm();
    }
    basis.phi_inv = basis.phi.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));

    // S0 = E1^T + E0 Phi Lambda Phi^-1; dS0 linearizes the Riccati equation:
    // A dS0 + dS0 A^T = dE2 + dE1 A^T + A dE1^T + A dE0 A^T, A = (S0-E1) E0^-1.
    DMat S0(n, n);
    S0.v = E1t.v + (pm.E0.v * (basis.phi * basis.lambda.asDiagonal() * basis.phi_inv)).real();
    S0.v = 0.5 * (S0.v + S0.v.transpose()).eval();
    const Eigen::MatrixXd A = (S0.v - pm.E1.v) * E0inv.v;
    if (with_sensitivities) {
        const Eigen::MatrixXd R0 =
            pm.E2.d0 + pm.E1.d0 * A.transpose() + A * pm.E1.d0.transpose() +
            A * pm.E0.d0 * A.transpose();
        const Eigen::MatrixXd R1 =
            pm.E2.d1 + pm.E1.d1 * A.transpose() + A * pm.E1.d1.transpose() +
            A * pm.E0.d1 * A.transpose();
        S0.d0 = basis.solve(R0, 0.0);
        S0.d1 = basis.solve(R1, 0.0);
    }

    // (A + I) S1 + S1 (A + I)^T = M0 and its linearization.
    DMat S1(n, n);
    S1.v = basis.solve(pm.M0.v, 1.0);
    S1.v = 0.5 * (S1.v + S1.v.transpose()).eval();
    if (with_sensitivities) {
        const Eigen::MatrixXd dA0 = (S0.d0 - pm.E1.d0) * E0inv.v + (S0.v - pm.E1.v) * E0inv.d0;
        const Eigen::MatrixXd dA1 = (S0.d1 - pm.E1.d1) * E0inv.v + (S0.v - pm.E1.v) * E0inv.d1;
        S1.d0 = basis.solve(pm.M0.d0 - dA0 * S1.v - S1.v * dA0.transpose(), 1.0);
        S1.d1 = basis.solve(pm.M0.d1 - dA1 * S1.v - S1.v * dA1.transpose(), 1.0);
    }
    cf.levels.push_back({symm(S0), symm(S1)});

    if (!with_sensitivities) {
        // Value-only recursion on plain matrices; same equations, no duals.
        Eigen::MatrixXd G = E0inv.v;
        Eigen::MatrixXd P0 = E0inv.v * E1t.v;
        Eigen::MatrixXd P1 = Eigen::MatrixXd::Zero(n, n), V2 = P1;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        for (int m = 1; m <= cf_order; ++m) {
            const Eigen::MatrixXd X = cf.levels.back().S1.v;
            const Eigen::MatrixXd S0m = cf.levels.back().S0.v;
            const Eigen::MatrixXd Xi = X.partialPivLu().solve(I);
            const Eigen::MatrixXd Gn =
                Xi * (X * G * X - X * P1 - P1.transpose() * X + V2) * Xi.transpose();
            const Eigen::MatrixXd P0n = Xi * (S0m * G - P0.transpose()) * X + 2.0 * I;
            const Eigen::MatrixXd P1n = Xi * (X * G - P1.transpose()) * X;
            const Eigen::MatrixXd V2n = X.transpose() * G * X;

            const SchurFactor FP(ccast(P0n));
            Eigen::MatrixXd W = solve_sylvester(FP, FP.transposed(), ccast(Gn)).real();
            W = 0.5 * (W + W.transpose()).eval();
            Eigen::MatrixXd Z0v = W.partialPivLu().solve(I);
            Z0v = 0.5 * (Z0v + Z0v.transpose()).eval();

            const Eigen::MatrixXd Lp = Z0v * Gn - P0n.transpose() + I;
            const Eigen::MatrixXd RHS = Z0v * P1n + P1n.transpose() * Z0v;
            const SchurFactor FL(ccast(Lp));
            Eigen::MatrixXd Z1v = solve_sylvester(FL, FL.transposed(), ccast(RHS)).real();
            Z1v = 0.5 * (Z1v + Z1v.transpose()).eval();

            DMat Z0(n, n), Z1(n, n);
            Z0.v = Z0v;
            Z1.v = Z1v;
            cf.levels.push_back({Z0, Z1});
            G = Gn;
            P0 = P0n;
            P1 = P1n;
            V2 = V2n;
        }
        for (const auto& lv : cf.levels) {
            ContinuedFraction::LevelC lc;
            lc.S0 = ccast(lv.S0.v);
            lc.S1 = ccast(lv.S1.v);
            lc.S1t = ccast(lv.S1.v.transpose());
            cf.levels_c.push_back(std::move(lc));
        }
        return cf;
    }

    // Data of the level equation
    // 2 chi Y' + Y G Y - Y (P0 + chi P1) - (P0 + chi P1)^T Y + V0 + chi V1 + chi^2 V2 = 0.
    DMat G = E0inv;
    DMat P0 = E0inv * E1t;
    DMat P1(n, n), V2(n, n);
    const DMat I(Eigen::MatrixXd::Identity(n, n));

    for (int m = 1; m <= cf_order; ++m) {
        const DMat X = cf.levels.back().S1;
        const DMat S0m = cf.levels.back().S0;
        const DMat Xi = dinv(X);
        const DMat Xit = Xi.transpose();
        const DMat Gn = Xi * (X * G * X - X * P1 - P1.transpose() * X + V2) * Xit;
        const DMat P0n = Xi * (S0m * G - P0.transpose()) * X + 2.0 * I;
        const DMat P1n = Xi * (X * G - P1.transpose()) * X;
        const DMat V2n = X.transpose() * G * X;

        // Homogeneous Riccati Z0 G' Z0 - Z0 P0' - P0'^T Z0 = 0, solved through
        // W = Z0^-1 which satisfies the Lyapunov equation P0' W + W P0'^T = G'.
        const SchurFactor FP(ccast(P0n.v));
        const SchurFactor FPt = FP.transposed();
        DMat W(n, n);
        W.v = solve_sylvester(FP, FPt, ccast(Gn.v)).real();
        W.v = 0.5 * (W.v + W.v.transpose()).eval();
        W.d0 = solve_sylvester(
                   FP, FPt, ccast(Gn.d0 - P0n.d0 * W.v - W.v * P0n.d0.transpose()))
                   .real();
        W.d1 = solve_sylvester(
                   FP, FPt, ccast(Gn.d1 - P0n.d1 * W.v - W.v * P0n.d1.transpose()))
                   .real();
        const DMat Z0 = symm(dinv(W));

        // L' Z1 + Z1 L'^T = Z0 P1' + P1'^T Z0, L' = Z0 G' - P0'^T + I.
        const DMat Lp = Z0 * Gn - P0n.transpose() + I;
        const DMat RHS = Z0 * P1n + P1n.transpose() * Z0;
        const SchurFactor FL(ccast(Lp.v));
        const SchurFactor FLt = FL.transposed();
        DMat Z1(n, n);
        Z1.v = solve_sylvester(FL, FLt, ccast(RHS.v)).real();
        Z1.v = 0.5 * (Z1.v + Z1.v.transpose()).eval();
        Z1.d0 = solve_sylvester(
                    FL, FLt, ccast(RHS.d0 - Lp.d0 * Z1.v - Z1.v * Lp.d0.transpose()))
                    .real();
        Z1.d1 = solve_sylvester(
                    FL, FLt, ccast(RHS.d1 - Lp.d1 * Z1.v - Z1.v * Lp.d1.transpose()))
                    .real();
        cf.levels.push_back({Z0, symm(Z1)});

        G = Gn;
        P0 = P0n;
        P1 = P1n;
        V2 = V2n;
    }
    for (const auto& lv : cf.levels) {
        ContinuedFraction::LevelC lc;
        lc.S0 = ccast(lv.S0.v);
        lc.S1 = ccast(lv.S1.v);
        lc.S1t = ccast(lv.S1.v.transpose());
        lc.dS0[0] = ccast(lv.S0.d0);
        lc.dS0[1] = ccast(lv.S0.d1);
        lc.dS1[0] = ccast(lv.S1.d0);
        lc.dS1[1] = ccast(lv.S1.d1);
        cf.levels_c.push_back(std::move(lc));
    }
    return cf;
}

namespace {

// Every level matrix is symmetric, so X W X^T = X T with T = W X^T needs only
// one triangle; the other half is mirrored.
void symmetric_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                       Eigen::MatrixXcd& out) {
    out.resize(A.rows(), B.cols());
    out.triangularView<Eigen::Lower>() = A * B;
    out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
}

}  // namespace

Eigen::MatrixXcd ContinuedFraction::evaluate(Complexd omega) const {
    const Complexd chi = -(omega * omega);
    const int M = static_cast<int>(levels_c.size()) - 1;
    Eigen::MatrixXcd S = levels_c[M].S0 + chi * levels_c[M].S1;
    for (int m = M - 1; m >= 0; --m) {
        const Eigen::MatrixXcd T = S.partialPivLu().solve(levels_c[m].S1t);
        if (!T.allFinite())
            throw std::runtime_error("polygon stiffness: singular continued-fraction level " +
                                     std::to_string(m + 1));
        S = levels_c[m].S0 + chi * levels_c[m].S1 - (chi * chi) * (levels_c[m].S1 * T);
    }
    return 0.5 * (S + S.transpose()).eval();
}

ZMat ContinuedFraction::evaluate_dual(Complexd omega) const {
    if (!has_sensitivities)
        throw std::logic_error("evaluate_dual: setup skipped the sensitivities");
    const Complexd chi = -(omega * omega);
    const Complexd chi2 = chi * chi;
    const int M = static_cast<int>(levels_c.size()) - 1;
    ZMat S;
    S.v = levels_c[M].S0 + chi * levels_c[M].S1;
    S.d0 = levels_c[M].dS0[0] + chi * levels_c[M].dS1[0];
    S.d1 = levels_c[M].dS0[1] + chi * levels_c[M].dS1[1];
    Eigen::MatrixXcd P, A, B, C;
    for (int m = M - 1; m >= 0; --m) {
        const auto& lc = levels_c[m];
        // T = W X^T with W = (S^(m+1))^-1; then X W X^T = X T, and with
        // W symmetric d(X W X^T) = dX T + (dX T)^T - T^T dS T.
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S.v);
        const Eigen::MatrixXcd T = lu.solve(lc.S1t);
        if (!T.allFinite())
            throw std::runtime_error("polygon stiffness: singular continued-fraction level " +
                                     std::to_string(m + 1));
        ZMat next;
        symmetric_product(lc.S1, T, P);
        next.v = lc.S0 + chi * lc.S1 - chi2 * P;
        for (int k = 0; k < 2; ++k) {
            A.noalias() = lc.dS1[k] * T;
            B.noalias() = (k == 0 ? S.d0 : S.d1) * T;
            symmetric_product(T.transpose(), B, C);
            (k == 0 ? next.d0 : next.d1) =
                lc.dS0[k] + chi * lc.dS1[k] - chi2 * (A + A.transpose() - C);
        }
        S = std::move(next);
    }
    return S;
}

}  // namespace notchscan
