#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "core/dual.hpp"
#include "doctest.h"

using notchscan::Dual;
using notchscan::DualReal;
using notchscan::DualScalar;
using Complex = std::complex<double>;

namespace {

// Independent symbolic oracle: expression trees differentiated by structural
// recursion, evaluated in plain complex arithmetic.
struct Expr {
    enum Kind { Const, Var0, Var1, Add, Sub, Mul, Div, Sin, Cos, Exp } kind;
    Complex c;
    std::unique_ptr<Expr> a, b;
};

struct Value {
    Complex v, d0, d1;
};

// peak tracks the largest intermediate magnitude so that trials whose
// subexpressions leave the well-scaled range can be skipped: overflow
// robustness of equivalent derivative formulas is not under test here.
Value eval(const Expr& e, Complex q0, Complex q1, double& peak) {
    Value r;
    switch (e.kind) {
        case Expr::Const: r = {e.c, 0.0, 0.0}; break;
        case Expr::Var0: r = {q0, 1.0, 0.0}; break;
        case Expr::Var1: r = {q1, 0.0, 1.0}; break;
        case Expr::Sin:
        case Expr::Cos:
        case Expr::Exp: {
            const Value x = eval(*e.a, q0, q1, peak);
            if (e.kind == Expr::Sin)
                r = {std::sin(x.v), std::cos(x.v) * x.d0, std::cos(x.v) * x.d1};
            else if (e.kind == Expr::Cos)
                r = {std::cos(x.v), -std::sin(x.v) * x.d0, -std::sin(x.v) * x.d1};
            else
                r = {std::exp(x.v), std::exp(x.v) * x.d0, std::exp(x.v) * x.d1};
            break;
        }
        default: {
            const Value x = eval(*e.a, q0, q1, peak);
            const Value y = eval(*e.b, q0, q1, peak);
            switch (e.kind) {
                case Expr::Add: r = {x.v + y.v, x.d0 + y.d0, x.d1 + y.d1}; break;
                case Expr::Sub: r = {x.v - y.v, x.d0 - y.d0, x.d1 - y.d1}; break;
                case Expr::Mul:
                    r = {x.v * y.v, x.d0 * y.v + x.v * y.d0, x.d1 * y.v + x.v * y.d1};
                    break;
                default:
                    r = {x.v / y.v, (x.d0 - x.v / y.v * y.d0) / y.v,
                         (x.d1 - x.v / y.v * y.d1) / y.v};
                    break;
            }
            break;
        }
    }
    const double m = std::abs(r.v) + std::abs(r.d0) + std::abs(r.d1);
    peak = std::isfinite(m) ? std::max(peak, m) : std::numeric_limits<double>::infinity();
    return r;
}

DualScalar eval_dual(const Expr& e, const DualScalar& q0, const DualScalar& q1) {
    switch (e.kind) {
        case Expr::Const: return DualScalar(e.c);
        case Expr::Var0: return q0;
        case Expr::Var1: return q1;
        case Expr::Sin: return sin(eval_dual(*e.a, q0, q1));
        case Expr::Cos: return cos(eval_dual(*e.a, q0, q1));
        case Expr::Exp: return exp(eval_dual(*e.a, q0, q1));
        case Expr::Add: return eval_dual(*e.a, q0, q1) + eval_dual(*e.b, q0, q1);
        case Expr::Sub: return eval_dual(*e.a, q0, q1) - eval_dual(*e.b, q0, q1);
        case Expr::Mul: return eval_dual(*e.a, q0, q1) * eval_dual(*e.b, q0, q1);
        default: return eval_dual(*e.a, q0, q1) / eval_dual(*e.b, q0, q1);
    }
}

std::unique_ptr<Expr> random_expr(std::mt19937_64& rng, int depth) {
    auto e = std::make_unique<Expr>();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if (depth == 0) {
        const int k = static_cast<int>(rng() % 3);
        e->kind = k == 0 ? Expr::Const : (k == 1 ? Expr::Var0 : Expr::Var1);
        e->c = Complex(u(rng), u(rng));
        return e;
    }
    const int k = static_cast<int>(rng() % 7);
    static const Expr::Kind ops[] = {Expr::Add, Expr::Sub, Expr::Mul, Expr::Div,
                                     Expr::Sin, Expr::Cos, Expr::Exp};
    e->kind = ops[k];
    e->a = random_expr(rng, depth - 1);
    if (k < 4) e->b = random_expr(rng, depth - 1);
    return e;
}

}  // namespace

TEST_CASE("dual arithmetic basics") {
    const DualReal x = DualReal::seed(3.0, 0);
    const DualReal y = DualReal::seed(2.0, 1);
    const DualReal z = x * y + x / y - y;
    CHECK(z.v == doctest::Approx(3.0 * 2.0 + 1.5 - 2.0));
    CHECK(z.d[0] == doctest::Approx(2.0 + 0.5));
    CHECK(z.d[1] == doctest::Approx(3.0 - 3.0 / 4.0 - 1.0));
}

TEST_CASE("dual elementary functions") {
    const DualReal x = DualReal::seed(0.7, 0);
    CHECK(sin(x).d[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
    CHECK(cos(x).d[0] == doctest::Approx(-std::sin(0.7)).epsilon(1e-14));
    CHECK(exp(x).d[0] == doctest::Approx(std::exp(0.7)).epsilon(1e-14));
    CHECK(log(x).d[0] == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
    CHECK(sqrt(x).d[0] == doctest::Approx(0.5 / std::sqrt(0.7)).epsilon(1e-14));
}

TEST_CASE("complex dual conj and abs") {
    DualScalar a(Complex(1.0, 2.0));
    a.d[0] = Complex(0.3, -0.4);
    a.d[1] = Complex(-1.0, 0.5);
    const DualScalar ca = conj(a);
    CHECK(ca.v == std::conj(a.v));
    CHECK(ca.d[0] == std::conj(a.d[0]));
    // |a| derivative against the identity d|a| = Re(conj(a) da)/|a|, and
    // against finite differences along a real parameter path.
    const Dual<double, 2> m = abs(a);
    CHECK(m.v == doctest::Approx(std::abs(a.v)));
    const double h = 1e-7;
    const double fd = (std::abs(a.v + h * a.d[0]) - std::abs(a.v - h * a.d[0])) / (2 * h);
    CHECK(m.d[0] == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("abs at zero is guarded") {
    DualScalar a(Complex(0.0, 0.0));
    a.d[0] = Complex(1.0, 1.0);
    const Dual<double, 2> m = abs(a);
    CHECK(m.v == 0.0);
    CHECK(m.d[0] == 0.0);
}

TEST_CASE("1000 random expression trees match the symbolic oracle") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto e = random_expr(rng, 4);
        const Complex q0(u(rng), u(rng)), q1(u(rng), u(rng));
        double peak = 0.0;
        const Value want = eval(*e, q0, q1, peak);
        const double mag =
            std::max({1.0, std::abs(want.v), std::abs(want.d0), std::abs(want.d1)});
        if (!std::isfinite(peak) || peak > 1e6) continue;  // skip blowing-up trees
        const DualScalar got = eval_dual(*e, DualScalar::seed(q0, 0), DualScalar::seed(q1, 1));
        CHECK(std::abs(got.v - want.v) <= 1e-13 * mag);
        CHECK(std::abs(got.d[0] - want.d0) <= 1e-13 * mag);
        CHECK(std::abs(got.d[1] - want.d1) <= 1e-13 * mag);
        ++checked;
    }
    CHECK(checked > 800);
}
