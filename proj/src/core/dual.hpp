#ifndef NOTCHSCAN_DUAL_HPP
#define NOTCHSCAN_DUAL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

namespace notchscan {

/// Forward-mode dual number carrying a value and N directional derivatives.
/// T may be double or std::complex<double>; the derivative directions are the
/// two notch parameters throughout this project (N = 2).
template <typename T, int N = 2>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() = default;
    Dual(T value) : v(value) { d.fill(T(0)); }
    Dual(T value, const std::array<T, N>& deriv) : v(value), d(deriv) {}

    static Dual seed(T value, int dir) {
        Dual r(value);
        r.d[dir] = T(1);
        return r;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const T iv = T(1) / o.v;
        v *= iv;
        for (int i = 0; i < N; ++i) d[i] = (d[i] - v * o.d[i]) * iv;
        return *this;
    }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
    friend Dual operator-(const Dual& a) {
        Dual r(-a.v);
        for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
        return r;
    }
    friend Dual operator+(const Dual& a) { return a; }

    friend Dual operator+(const T& a, Dual b) { return Dual(a) + b; }
    friend Dual operator-(const T& a, const Dual& b) { return Dual(a) - b; }
    friend Dual operator*(const T& a, Dual b) { return Dual(a) * b; }
    friend Dual operator/(const T& a, const Dual& b) { return Dual(a) / b; }
    friend Dual operator+(Dual a, const T& b) { return a += Dual(b); }
    friend Dual operator-(Dual a, const T& b) { return a -= Dual(b); }
    friend Dual operator*(Dual a, const T& b) { return a *= Dual(b); }
    friend Dual operator/(Dual a, const T& b) { return a /= Dual(b); }

    friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }

    friend std::ostream& operator<<(std::ostream& os, const Dual& a) {
        os << a.v << " [";
        for (int i = 0; i < N; ++i) os << (i ? ", " : "") << a.d[i];
        return os << "]";
    }
};

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
    using std::exp;
    Dual<T, N> r(exp(a.v));
    for (int i = 0; i < N; ++i) r.d[i] = r.v * a.d[i];
    return r;
}

template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
    using std::log;
    Dual<T, N> r(log(a.v));
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] / a.v;
    return r;
}

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
    using std::sqrt;
    Dual<T, N> r(sqrt(a.v));
    const T s = T(1) / (T(2) * r.v);
    for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
    return r;
}

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
    using std::cos;
    using std::sin;
    Dual<T, N> r(sin(a.v));
    const T c = cos(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = c * a.d[i];
    return r;
}

template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
    using std::cos;
    using std::sin;
    Dual<T, N> r(cos(a.v));
    const T s = -sin(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
    return r;
}

/// Conjugation of a complex dual w.r.t. real parameters commutes with d/dq.
template <int N>
Dual<std::complex<double>, N> conj(const Dual<std::complex<double>, N>& a) {
    Dual<std::complex<double>, N> r(std::conj(a.v));
    for (int i = 0; i < N; ++i) r.d[i] = std::conj(a.d[i]);
    return r;
}

/// |a| for complex dual a with real parameters: d|a| = Re(conj(a) da)/|a|.
template <int N>
Dual<double, N> abs(const Dual<std::complex<double>, N>& a) {
    Dual<double, N> r(std::abs(a.v));
    for (int i = 0; i < N; ++i)
        r.d[i] = r.v > 0 ? std::real(std::conj(a.v) * a.d[i]) / r.v : 0.0;
    return r;
}

template <typename T, int N>
Dual<T, N> abs(const Dual<T, N>& a) {
    using std::abs;
    Dual<T, N> r(abs(a.v));
    const T s = a.v < T(0) ? T(-1) : T(1);
    for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
    return r;
}

using DualScalar = Dual<std::complex<double>, 2>;  ///< value + d/dq1, d/dq2
using DualReal = Dual<double, 2>;

inline DualScalar complexify(const DualReal& a) {
    DualScalar r{std::complex<double>(a.v)};
    for (int i = 0; i < 2; ++i) r.d[i] = std::complex<double>(a.d[i]);
    return r;
}

}  // namespace notchscan

#endif
