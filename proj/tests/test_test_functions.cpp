#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fluctuon/quadrature.hpp"
#include "fluctuon/test_function.hpp"

using namespace fluctuon;

namespace {
const double pi = std::numbers::pi;

TestFunction plain_sine() {
    return TestFunction("sin(pi u)", [](double u, int k) { return std::pow(pi, k) * std::sin(pi * u + k * pi / 2); },
                        64, Space::S_Dir, Extension::EvenReflection);
}
}  // namespace

TEST_CASE("every basis function passes its own space check") {
    const double rk = 0.73;
    for (Space s : {Space::S, Space::S_Dir, Space::S_Rob, Space::S_Neu})
        for (int n = 1; n <= 6; ++n) {
            TestFunction H = make_basis(s, n, rk);
            CAPTURE(to_string(s));
            CAPTURE(n);
            CHECK(H.space() == s);
            CHECK(space_check(H, s, 3, 1e-8, rk).pass);
            for (double u : {0.0, 0.13, 0.5, 0.91}) CHECK(H.deriv(u, 0) == H(u));
        }
}

TEST_CASE("basis normalization") {
    for (Space s : {Space::S, Space::S_Dir, Space::S_Rob, Space::S_Neu})
        for (int n = 1; n <= 3; ++n) {
            TestFunction H = make_basis(s, n, 0.4);
            if (s == Space::S_Rob) continue;  // cos(omega u + phase) is not normalized
            CHECK(inner(H, H, InnerKind::L2) == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("sine and cosine boundary values") {
    auto d = make_basis(Space::S_Dir, 1);
    CHECK(std::fabs(d(0)) < 1e-15);
    CHECK(std::fabs(d(1)) < 1e-15);
    CHECK(std::fabs(d.deriv(0, 2)) < 1e-12);
    auto n = make_basis(Space::S_Neu, 1);
    CHECK(std::fabs(n.deriv(0, 1)) < 1e-12);
    CHECK(std::fabs(n.deriv(1, 1)) < 1e-12);
}

TEST_CASE("Robin modes solve their boundary conditions") {
    for (double k : {0.0, 0.2, 0.7312, 3.0, 40.0}) {
        for (int n = 1; n <= 8; ++n) {
            auto H = make_basis(Space::S_Rob, n, k);
            CAPTURE(k);
            CAPTURE(n);
            CHECK(std::fabs(H.deriv(0, 1) - k * H(0)) < 1e-10);
            CHECK(std::fabs(H.deriv(1, 1) + k * H(1)) < 1e-10);
            RobinMode m = robin_mode(n, k);
            CHECK(m.omega >= (n - 1) * pi - 1e-12);
            CHECK(m.omega <= n * pi + 1e-12);
        }
    }
    // distinct modes are orthogonal
    auto a = make_basis(Space::S_Rob, 1, 0.7), b = make_basis(Space::S_Rob, 3, 0.7);
    CHECK(std::fabs(inner(a, b, InnerKind::L2)) < 1e-9);
    CHECK_THROWS(robin_mode(0, 1.0));
}

TEST_CASE("bump and phi") {
    const Bump& B = Bump::instance();
    CHECK(B.integral(1.0) == 1.0);
    CHECK(B.integral(0.5) == doctest::Approx(0.5).epsilon(1e-10));
    QuadResult q = integrate_unit([&](double u) { return B.a(u, 0); });
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    auto a = make_special(Special::BumpA);
    CHECK(space_check(a, Space::S, 6, 1e-8).pass);
    auto phi = make_special(Special::Phi);
    CHECK(phi(0.0) == 1.0);
    CHECK(phi(1.0) == 0.0);
    CHECK(phi(0.3) > phi(0.6));
    // derivative of phi against a central difference
    double h = 1e-5;
    CHECK(phi.deriv(0.4, 1) == doctest::Approx((phi(0.4 + h) - phi(0.4 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("psi identities on a 1000-point grid") {
    const double al = 5.0, be = 0.4;
    auto psi = make_special(Special::PsiAB, al, be);
    for (int i = 0; i <= 1000; ++i) {
        double u = i / 1000.0;
        if (u <= be) CHECK(psi(u) == doctest::Approx(u).epsilon(1e-12));
        if (u >= be + 1 / al) CHECK(std::fabs(psi(u)) < 1e-14);
    }
    CHECK_THROWS(make_special(Special::PsiAB, 1.2, 0.4));
    CHECK_THROWS(make_special(Special::PsiAB, 5.0, 1.0));
}

TEST_CASE("tanaka matches at the kink") {
    const double e = 0.1;
    auto T = make_special(Special::Tanaka, e);
    CHECK(T(e) == doctest::Approx(e / 2));
    CHECK(T(e + 1e-12) == doctest::Approx(e / 2));
    CHECK(T.deriv(e, 1) == doctest::Approx(1.0));
    CHECK(T.deriv(e + 1e-12, 1) == doctest::Approx(1.0));
    CHECK_THROWS(make_special(Special::Tanaka, 0.5));
}

TEST_CASE("iota windows integrate to one") {
    for (double e : {0.05, 0.2, 0.37, 1.0}) {
        auto i0 = make_special(Special::Iota0, e);
        auto i1 = make_special(Special::Iota1, e);
        CHECK(i0.space() == Space::Plumbing);
        CHECK(integrate_unit([&](double u) { return i0(u); }, i0.breaks()).value == doctest::Approx(1.0));
        CHECK(integrate_unit([&](double u) { return i1(u); }, i1.breaks()).value == doctest::Approx(1.0));
    }
    CHECK_THROWS(make_special(Special::Iota0, 0.0));
}

TEST_CASE("space checks on plain sine") {
    auto s = plain_sine();
    CHECK(space_check(s, Space::S_Dir, 4, 1e-10).pass);
    auto rep = space_check(s, Space::S, 1, 1e-10);
    CHECK_FALSE(rep.pass);
    bool saw_slope = false;
    for (auto& c : rep.conditions)
        if (c.order == 1 && c.endpoint == 0) saw_slope = !c.pass && c.residual == doctest::Approx(pi);
    CHECK(saw_slope);
    CHECK_THROWS(space_check(make_special(Special::Tanaka, 0.1), Space::S, 3, 1e-8));
}

TEST_CASE("inner products") {
    auto s = plain_sine();
    CHECK(inner(s, s, InnerKind::L2) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(inner(s, s, InnerKind::H1) == doctest::Approx(pi * pi / 2).epsilon(1e-11));

    JumpKernel k = build_kernel(3.0);
    ContinuumProfiles P(k);
    auto a = make_special(Special::BumpA);
    double v = inner(a, a, InnerKind::L2_V1, &P);
    // oracle: fine plain composite Simpson on a mesh that ignores the grading
    const int n = 200000;
    double s2 = 0;
    for (int i = 1; i < n; ++i) {
        double u = double(i) / n;
        double f = P.V1(u) * a(u) * a(u);
        s2 += (i % 2 ? 4 : 2) * f;
    }
    s2 /= 3.0 * n;
    CHECK(v == doctest::Approx(s2).epsilon(1e-8));
    CHECK(std::isfinite(v));
    // V1 against a function that does not vanish at 0 diverges
    CHECK_THROWS(inner(s, constant_function(1.0), InnerKind::L2_V1, &P));
}

TEST_CASE("quadrature is stable under refinement") {
    auto a = make_basis(Space::S, 2);
    auto f = [&](double u) { return a(u) * a(u); };
    double c = gauss_on_mesh(f, graded_mesh(64, 3.0, a.breaks()));
    double f2 = gauss_on_mesh(f, graded_mesh(128, 3.0, a.breaks()));
    CHECK(std::fabs(c - f2) < 1e-9);
}

TEST_CASE("norm_theta") {
    JumpKernel k = build_kernel(3.0);
    ModelParams p;
    p.rho = 0.5;
    p.theta = 0;
    auto s = plain_sine();
    CHECK(norm_theta(s, p, k) == doctest::Approx(k.sigma2 * pi * pi / 4).epsilon(1e-10));
    CHECK(norm_theta(s, p, k) == doctest::Approx(3.75).epsilon(1e-12));
    // homogeneity in the squared form
    CHECK(norm_theta(2.5 * s, p, k) == doctest::Approx(6.25 * norm_theta(s, p, k)));

    p.theta = -2;
    auto zero = 0.0 * make_special(Special::BumpA);
    CHECK(norm_theta(zero, p, k) == 0.0);

    // Robin: a nonzero constant breaks the boundary condition, Robin modes carry a boundary term
    p.theta = 1;
    auto c = make_basis(Space::S_Neu, 0);
    double rk = robin_coupling(p, k);
    CHECK_THROWS(norm_theta(c, p, k));
    auto r = make_basis(Space::S_Rob, 1, rk);
    double d0 = r.deriv(0, 1), d1 = r.deriv(1, 1);
    double want = 2 * 0.25 * k.sigma2 *
                  (inner(r, r, InnerKind::H1) + k.sigma2 / (4 * p.kappa * k.m) * (d0 * d0 + d1 * d1));
    CHECK(norm_theta(r, p, k) == doctest::Approx(want));

    // both volume terms at the critical exponent
    p.theta = -1;
    auto a = make_special(Special::BumpA);
    ContinuumProfiles P(k);
    double both = 2 * 0.25 * k.sigma2 * (inner(a, a, InnerKind::H1) + inner(a, a, InnerKind::L2_V1, &P) / k.sigma2);
    CHECK(norm_theta(a, p, k) == doctest::Approx(both));
}

TEST_CASE("cutoff approximation shrinks in H1") {
    auto H = plain_sine();
    double prev = INFINITY;
    for (double e : {0.2, 0.1, 0.05}) {
        auto D = H * make_special(Special::CutoffPhi, e) + (-1.0) * H;
        double n = inner(D, D, InnerKind::L2) + inner(D, D, InnerKind::H1);
        CAPTURE(e);
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("function table export") {
    auto csv = function_table_csv(plain_sine(), 3);
    CHECK(csv.rfind("u,H,H1,H2\n", 0) == 0);
    CHECK(csv.find("\n0.5,1,") != std::string::npos);
}
