#include "core/waveguide.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace notchscan {

namespace {

using Complexd = std::complex<double>;

// All 2n eigenpairs of mu^2 E0 + mu (E1^T - E1) + (omega^2 M0 - E2) via the
// companion linearization acting on [psi; mu psi].
void all_modes(const CrossSectionMatrices& cs, Complexd omega, Eigen::VectorXcd& mu,
               Eigen::MatrixXcd& psi) {
    const int n = cs.n_dof;
    const Eigen::MatrixXd E0inv = cs.E0.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
    A.bottomLeftCorner(n, n) =
        (-E0inv * (omega * omega * cs.M0.cast<Complexd>() - cs.E2.cast<Complexd>()));
    A.bottomRightCorner(n, n) = (-E0inv * (cs.E1.transpose() - cs.E1)).cast<Complexd>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
    if (es.info() != Eigen::Success) throw std::runtime_error("solve_modes: eigensolver failed");
    mu = es.eigenvalues();
    psi.resize(n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) {
        Eigen::VectorXcd top = es.eigenvectors().col(j).head(n);
        psi.col(j) = top / top.norm();
    }
}

}  // namespace

WaveguideModes solve_modes(const CrossSectionMatrices& cs, Complexd omega) {
    const int n = cs.n_dof;
    Eigen::VectorXcd mu;
    Eigen::MatrixXcd psi;
    all_modes(cs, omega, mu, psi);

    std::vector<int> idx(2 * n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto n_left = std::count_if(idx.begin(), idx.end(),
                                      [&](int j) { return mu(j).real() < 0.0; });
    // At a damped frequency the spectrum splits strictly; otherwise fall back
    // to a median split so both families stay square.
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return mu(a).real() < mu(b).real(); });
    if (n_left != n && std::abs(omega.imag()) > 0.0)
        throw std::runtime_error("solve_modes: unbalanced mode families");

    WaveguideModes m;
    m.omega = omega;
    m.mu_l.resize(n);
    m.mu_r.resize(n);
    m.psi_l.resize(n, n);
    m.psi_r.resize(n, n);
    for (int j = 0; j < n; ++j) {
        m.mu_l(j) = mu(idx[j]);
        m.psi_l.col(j) = psi.col(idx[j]);
        m.mu_r(j) = mu(idx[n + j]);
        m.psi_r.col(j) = psi.col(idx[n + j]);
    }
    const Eigen::MatrixXcd E0c = cs.E0.cast<Complexd>();
    const Eigen::MatrixXcd E1tc = cs.E1.transpose().cast<Complexd>();
    m.q_l = E0c * m.psi_l * m.mu_l.asDiagonal() + E1tc * m.psi_l;
    m.q_r = E0c * m.psi_r * m.mu_r.asDiagonal() + E1tc * m.psi_r;
    return m;
}

ZMat waveguide_stiffness(const WaveguideModes& m, const DualReal& L) {
    const int n = static_cast<int>(m.mu_l.size());
    const Eigen::VectorXcd el = (m.mu_l.array() * L.v).exp();
    const Eigen::VectorXcd er = (-m.mu_r.array() * L.v).exp();

    Eigen::MatrixXcd Du(2 * n, 2 * n), Df(2 * n, 2 * n);
    Du.topLeftCorner(n, n) = m.psi_l;
    Du.topRightCorner(n, n) = m.psi_r * er.asDiagonal();
    Du.bottomLeftCorner(n, n) = m.psi_l * el.asDiagonal();
    Du.bottomRightCorner(n, n) = m.psi_r;
    Df.topLeftCorner(n, n) = -m.q_l;
    Df.topRightCorner(n, n) = -m.q_r * er.asDiagonal();
    Df.bottomLeftCorner(n, n) = m.q_l * el.asDiagonal();
    Df.bottomRightCorner(n, n) = m.q_r;

    const Eigen::MatrixXcd Duinv =
        Du.partialPivLu().solve(Eigen::MatrixXcd::Identity(2 * n, 2 * n));
    ZMat S;
    S.v = Df * Duinv;
    // The exact modal stiffness is symmetric; the eigensolver leaves
    // asymmetry at its residual level (~1e-8 relative), so restore it.
    S.v = 0.5 * (S.v + S.v.transpose()).eval();

    const Eigen::VectorXcd del = m.mu_l.cwiseProduct(el);
    const Eigen::VectorXcd der = -m.mu_r.cwiseProduct(er);
    Eigen::MatrixXcd dDu = Eigen::MatrixXcd::Zero(2 * n, 2 * n), dDf = dDu;
    dDu.topRightCorner(n, n) = m.psi_r * der.asDiagonal();
    dDu.bottomLeftCorner(n, n) = m.psi_l * del.asDiagonal();
    dDf.topRightCorner(n, n) = -m.q_r * der.asDiagonal();
    dDf.bottomLeftCorner(n, n) = m.q_l * del.asDiagonal();
    Eigen::MatrixXcd dS = (dDf - S.v * dDu) * Duinv;
    dS = 0.5 * (dS + dS.transpose()).eval();
    S.d0 = L.d[0] * dS;
    S.d1 = L.d[1] * dS;
    return S;
}

std::vector<DispersionPoint> dispersion_curves(const CrossSectionMatrices& cs,
                                               const std::vector<double>& z_nodes,
                                               const std::vector<double>& frequencies) {
    const int nn = static_cast<int>(z_nodes.size());
    const double thickness = z_nodes.back() - z_nodes.front();
    const double im_k_max = 0.01 / thickness;
    std::vector<DispersionPoint> out;
    for (double f : frequencies) {
        Eigen::VectorXcd mu;
        Eigen::MatrixXcd psi;
        all_modes(cs, Complexd(2.0 * M_PI * f, 0.0), mu, psi);
        std::vector<DispersionPoint> here;
        std::vector<Eigen::VectorXcd> shapes;
        for (int j = 0; j < 2 * static_cast<int>(cs.n_dof); ++j) {
            // k = -i mu, so Re k = Im mu and Im k = -Re mu. Keep right-going
            // near-propagating modes only.
            const double re_k = mu(j).imag(), im_k = -mu(j).real();
            if (re_k <= 0.0 || std::abs(im_k) >= im_k_max) continue;
            DispersionPoint p;
            p.frequency = f;
            p.re_k = re_k;
            p.im_k = im_k;
            p.wavelength = 2.0 * M_PI / re_k;
            // Parity about the midplane: symmetric modes have even u_x, odd u_z.
            double sym = 0.0, asym = 0.0;
            for (int i = 0; i < nn; ++i) {
                const int mir = nn - 1 - i;
                const Complexd ux = psi(2 * i, j), uz = psi(2 * i + 1, j);
                const Complexd mx = psi(2 * mir, j), mz = psi(2 * mir + 1, j);
                sym += std::norm(ux - mx) + std::norm(uz + mz);
                asym += std::norm(ux + mx) + std::norm(uz - mz);
            }
            p.family = sym <= asym ? 'S' : 'A';
            here.push_back(p);
        }
        for (char fam : {'S', 'A'}) {
            std::vector<DispersionPoint*> group;
            for (auto& p : here)
                if (p.family == fam) group.push_back(&p);
            std::sort(group.begin(), group.end(),
                      [](const DispersionPoint* a, const DispersionPoint* b) {
                          return a->re_k > b->re_k;
                      });
            for (size_t i = 0; i < group.size(); ++i) group[i]->order = static_cast<int>(i);
        }
        out.insert(out.end(), here.begin(), here.end());
    }
    return out;
}

}  // namespace notchscan
