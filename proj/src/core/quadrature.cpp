#include "core/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace notchscan {

namespace {

// Legendre polynomial P_n(x) and derivative via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace

LobattoBasis lobatto_basis(int degree) {
    if (degree < 1) throw std::invalid_argument("lobatto_basis: degree must be >= 1");
    const int p = degree;
    const int n = p + 1;
    LobattoBasis b;
    b.degree = p;
    b.nodes.resize(n);
    b.weights.resize(n);
    b.nodes(0) = -1.0;
    b.nodes(p) = 1.0;
    // Interior nodes are the roots of P_p'(x); Chebyshev-Gauss-Lobatto points
    // make good Newton starting values.
    for (int i = 1; i < p; ++i) {
        double x = -std::cos(M_PI * i / p);
        for (int it = 0; it < 100; ++it) {
            // Newton on f = P_p'(x); f' from the Legendre ODE:
            // (1-x^2) P'' = 2x P' - p(p+1) P
            auto [P, dP] = legendre(p, x);
            const double d2P = (2.0 * x * dP - p * (p + 1.0) * P) / (1.0 - x * x);
            const double step = dP / d2P;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        b.nodes(i) = x;
    }
    for (int i = 0; i < n; ++i) {
        auto [P, dP] = legendre(p, b.nodes(i));
        b.weights(i) = 2.0 / (p * (p + 1.0) * P * P);
    }
    return b;
}

Eigen::VectorXd LobattoBasis::shape(double x) const {
    const int n = nodes.size();
    Eigen::VectorXd N(n);
    for (int i = 0; i < n; ++i) {
        double v = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) v *= (x - nodes(j)) / (nodes(i) - nodes(j));
        N(i) = v;
    }
    return N;
}

Eigen::VectorXd LobattoBasis::shape_deriv(double x) const {
    const int n = nodes.size();
    Eigen::VectorXd dN(n);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            double prod = 1.0 / (nodes(i) - nodes(k));
            for (int j = 0; j < n; ++j)
                if (j != i && j != k) prod *= (x - nodes(j)) / (nodes(i) - nodes(j));
            sum += prod;
        }
        dN(i) = sum;
    }
    return dN;
}

GaussRule gauss_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
    GaussRule r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            auto [P, dP] = legendre(n, x);
            const double step = P / dP;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        auto [P, dP] = legendre(n, x);
        r.points(n - 1 - i) = x;
        r.weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dP * dP);
    }
    return r;
}

}  // namespace notchscan
