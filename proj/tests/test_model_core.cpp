#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fluctuon/boundary.hpp"
#include "fluctuon/experiments.hpp"
#include "fluctuon/kernel.hpp"
#include "fluctuon/kn_operator.hpp"
#include "fluctuon/regime.hpp"
#include "fluctuon/test_function.hpp"

using namespace fluctuon;

namespace {

// sum_{y>=1} y^-s in long double: explicit head plus Euler-Maclaurin remainder at K
long double zeta_ld(long double s) {
    const long K = 200000;
    long double head = 0;
    for (long y = K - 1; y >= 1; --y) head += std::pow(static_cast<long double>(y), -s);
    long double k = K;
    long double tail = std::pow(k, 1 - s) / (s - 1) + 0.5L * std::pow(k, -s) + s * std::pow(k, -s - 1) / 12 -
                       s * (s + 1) * (s + 2) * std::pow(k, -s - 3) / 720;
    return head + tail;
}

struct Oracle {
    long double c, sigma2, m;
};

Oracle oracle(double gamma) {
    long double g = gamma;
    long double c = 1.0L / (2 * zeta_ld(g + 1));
    return {c, 2 * c * zeta_ld(g - 1), c * zeta_ld(g)};
}

double rel(double a, long double b) { return static_cast<double>(std::fabs((a - b) / b)); }

}  // namespace

TEST_CASE("kernel constants against the long double series") {
    for (double g : {2.5, 3.0, 4.0}) {
        JumpKernel k = build_kernel(g);
        Oracle o = oracle(g);
        CAPTURE(g);
        CHECK(rel(k.c_gamma, o.c) < 1e-10);
        CHECK(rel(k.sigma2, o.sigma2) < 1e-10);
        CHECK(rel(k.m, o.m) < 1e-10);
        CHECK(k.normalization_defect() < 1e-12);
    }
}

TEST_CASE("kernel constants against boost zeta") {
    using boost::math::zeta;
    for (double g : {2.5, 3.0, 4.0}) {
        JumpKernel k = build_kernel(g);
        long double c = 1.0L / (2 * zeta(static_cast<long double>(g + 1)));
        CHECK(rel(k.c_gamma, c) < 1e-12);
        CHECK(rel(k.sigma2, 2 * c * zeta(static_cast<long double>(g - 1))) < 1e-11);
        CHECK(rel(k.m, c * zeta(static_cast<long double>(g))) < 1e-11);
    }
}

TEST_CASE("closed forms at gamma 3") {
    JumpKernel k = build_kernel(3.0);
    const double pi = std::numbers::pi;
    CHECK(k.c_gamma == doctest::Approx(45 / std::pow(pi, 4)).epsilon(1e-13));
    CHECK(k.sigma2 == doctest::Approx(15 / (pi * pi)).epsilon(1e-13));
    CHECK(k.m == doctest::Approx(0.555313267663074).epsilon(1e-12));
}

TEST_CASE("kernel shape") {
    JumpKernel k = build_kernel(3.0);
    CHECK(k.p(0) == 0.0);
    for (long z : {1L, 2L, 7L, 100L, 4096L, 4097L, 100000L}) {
        CHECK(k.p(z) == k.p(-z));
        CHECK(k.p(z) == doctest::Approx(k.c_gamma * std::pow(double(z), -4.0)).epsilon(1e-14));
    }
    CHECK(k.tail(1) == doctest::Approx(0.5).epsilon(1e-13));
    double prev = k.tail(1);
    for (long z = 2; z < 6000; z += 37) {
        double t = k.tail(z);
        CHECK(t < prev);
        prev = t;
    }
    // across the table edge the tail must stay consistent with single terms
    CHECK(k.tail(k.z_max) - k.tail(k.z_max + 1) == doctest::Approx(k.p(k.z_max)).epsilon(1e-8));
    CHECK(k.tail(k.z_max + 1) - k.tail(k.z_max + 2) == doctest::Approx(k.p(k.z_max + 1)).epsilon(1e-6));
}

TEST_CASE("gamma at or below 2 is rejected") {
    CHECK_THROWS_WITH_AS(build_kernel(2.0), doctest::Contains("gamma must exceed 2"), std::invalid_argument);
    CHECK_THROWS(build_kernel(1.5));
    CHECK_THROWS(build_kernel(3.0, 999));
}

TEST_CASE("regime map") {
    JumpKernel k = build_kernel(3.0);
    ModelParams p;
    p.theta = 0;
    auto r = regime_of(p, k);
    CHECK(r.id == RegimeId::HeatDirichlet);
    CHECK(r.time_exponent == 2.0);
    CHECK(r.sigma_hat == doctest::Approx(k.sigma2 / 2));
    CHECK(r.kappa_hat == 0.0);
    CHECK(r.test_space == Space::S);

    p.theta = -1;
    r = regime_of(p, k);
    CHECK(r.id == RegimeId::ReactionDiffusionDirichlet);
    CHECK(r.time_exponent == 2.0);
    CHECK(r.sigma_hat == doctest::Approx(k.sigma2 / 2));
    CHECK(r.kappa_hat == p.kappa);
    CHECK(r.semigroup == SemigroupKind::SpectralReactionDiffusion);

    p.theta = -2;
    r = regime_of(p, k);
    CHECK(r.id == RegimeId::ReactionDirichlet);
    CHECK(r.time_exponent == doctest::Approx(1.0));
    CHECK(r.sigma_hat == 0.0);
    CHECK(r.frak_a == 0.0);
    CHECK(r.semigroup == SemigroupKind::Multiplier);
    CHECK(r.time_scale(64) == doctest::Approx(64.0));

    p.theta = 1;
    p.kappa = 2;
    r = regime_of(p, k);
    CHECK(r.id == RegimeId::HeatRobin);
    CHECK(r.frak_a == doctest::Approx(k.sigma2 / 2));
    CHECK(r.frak_b == doctest::Approx(k.m * 2));
    CHECK(r.test_space == Space::S_Rob);

    p.theta = 1.5;
    r = regime_of(p, k);
    CHECK(r.id == RegimeId::HeatNeumann);
    CHECK(r.frak_b == 0.0);
    CHECK(r.test_space == Space::S_Neu);
}

TEST_CASE("regime map over a grid lands on the equality bullets") {
    for (double g : {2.2, 2.5, 3.0, 3.7, 5.0}) {
        JumpKernel k = build_kernel(g);
        for (double th = -5; th <= 3; th += 0.125) {
            ModelParams p;
            p.gamma = g;
            p.theta = th;
            auto r = regime_of(p, k);
            const double crit = 2 - g;
            RegimeId want = th < crit - 1e-9   ? RegimeId::ReactionDirichlet
                            : th < crit + 1e-9 ? RegimeId::ReactionDiffusionDirichlet
                            : th < 1 - 1e-9    ? RegimeId::HeatDirichlet
                            : th < 1 + 1e-9    ? RegimeId::HeatRobin
                                               : RegimeId::HeatNeumann;
            CAPTURE(g);
            CAPTURE(th);
            CHECK(r.id == want);
            CHECK(r.time_exponent == doctest::Approx(th < crit ? g + th : 2.0));
        }
        ModelParams p;
        p.gamma = g;
        p.theta = 2 - g;
        CHECK(regime_of(p, k).id == RegimeId::ReactionDiffusionDirichlet);
        p.theta = 1;
        CHECK(regime_of(p, k).id == RegimeId::HeatRobin);
    }
}

TEST_CASE("boundary tables") {
    JumpKernel k = build_kernel(3.0);
    const int N = 100;
    auto T = boundary_tables(k, N);
    CHECK(T.r_minus[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(T.r_plus[N - 1] == doctest::Approx(0.5).epsilon(1e-13));
    for (int x = 1; x < N; ++x) {
        CHECK(T.r_plus[x] == T.r_minus[N - x]);
        CHECK(T.theta_minus[x] < 0);
        if (x > 1) CHECK(T.r_minus[x] < T.r_minus[x - 1]);
    }
    // direct summation oracle at x = 50
    long double s = 0;
    for (long y = 2000000; y >= 50; --y) s += std::pow(static_cast<long double>(y), -4.0L);
    s += std::pow(2000000.5L, -3.0L) / 3;
    CHECK(rel(T.r_minus[50], k.c_gamma * s) < 1e-11);
    CHECK_THROWS(boundary_tables(k, 1));
}

TEST_CASE("continuum profiles") {
    JumpKernel k = build_kernel(3.0);
    ContinuumProfiles P(k, 0.3, 0.3);
    CHECK(P.V1(0.5) == doctest::Approx(16 * k.c_gamma / 3).epsilon(1e-14));
    CHECK(P.V1(0.5) == doctest::Approx(2.463836).epsilon(1e-6));
    CHECK(P.r_minus(0.5) == P.r_plus(0.5));
    for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) CHECK(P.V0(u) == doctest::Approx(0.3 * P.V1(u)));
    CHECK_THROWS_AS(P.V1(0.0), std::domain_error);
    CHECK_THROWS_AS(P.r_plus(1.0), std::domain_error);
}

TEST_CASE("tail convergence is first order") {
    JumpKernel k = build_kernel(3.0);
    auto rows = tail_convergence_report(k, {100, 200, 400}, 0.25, 0.75);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].sup_minus < rows[0].sup_minus);
    CHECK(rows[2].sup_minus < rows[1].sup_minus);
    std::vector<double> n, e;
    for (auto& r : rows) n.push_back(r.N), e.push_back(r.sup_minus);
    CHECK(loglog_slope(n, e) == doctest::Approx(-1.0).epsilon(0.1));
    CHECK_THROWS(tail_convergence_report(k, {100}, 0.3, 0.3));

    // single point bound at u = 1/2
    auto T = boundary_tables(k, 100);
    ContinuumProfiles P(k);
    double err = std::fabs(1e6 * T.r_minus[50] - P.r_minus(0.5));
    CHECK(err <= k.c_gamma / 100 * std::pow(0.5, -4.0) * 2);
}

TEST_CASE("K_N on constants and linear functions") {
    JumpKernel k = build_kernel(3.0);
    auto one = constant_function(1.0).with_extension(Extension::EvenReflection);
    auto v = apply_KN(k, one, 64);
    for (int x = 1; x < 64; ++x) CHECK(std::fabs(v[x]) < 1e-9);

    // u extended evenly: interior values shrink with N
    TestFunction lin("u", [](double u, int d) { return d == 0 ? u : d == 1 ? 1.0 : 0.0; }, 4, Space::Plumbing,
                     Extension::EvenReflection);
    double prev = INFINITY;
    for (int N : {64, 128, 256}) {
        auto w = apply_KN(k, lin, N);
        double s = std::fabs(w[N / 4]);
        CHECK(s < prev);
        prev = s;
    }
    CHECK_THROWS(apply_KN(k, from_callable("bare", [](double u) { return u; }), 64));
}

TEST_CASE("K_N against sigma^2/2 H'' for sin^2, zero-extended") {
    JumpKernel k = build_kernel(3.0);
    auto H = sin2_zero_extended();
    auto e128 = kn_error(k, H, 128);
    auto e256 = kn_error(k, H, 256);
    CHECK(e256.sup_error < e128.sup_error);
    CHECK(e256.interior_error < 0.6 * e128.interior_error);

    // brute force oracle at one interior site, summing p over a long window
    const int N = 128, x = 40;
    long double s = 0;
    const double hx = std::pow(std::sin(std::numbers::pi * x / N), 2);
    for (long y = x - 4000000; y <= x + 4000000; ++y) {
        if (y == x) continue;
        double u = double(y) / N;
        double hy = (u > 0 && u < 1) ? std::pow(std::sin(std::numbers::pi * u), 2) : 0.0;
        s += k.p(y - x) * (hy - hx);
    }
    auto v = apply_KN(k, H, N);
    CHECK(v[x] == doctest::Approx(double(s) * N * N).epsilon(1e-9));
}

TEST_CASE("lattice generator matches the operator") {
    JumpKernel k = build_kernel(3.0);
    const int N = 20;
    std::vector<double> h(N + 1, 0.0);
    for (int x = 1; x < N; ++x) h[x] = std::cos(0.3 * x);
    auto L = lattice_generator(k, h, N);
    for (int x = 1; x < N; ++x) {
        double s = 0;
        for (int y = 1; y < N; ++y) s += k.p(y - x) * (h[y] - h[x]);
        CHECK(L[x] == doctest::Approx(s).epsilon(1e-13));
    }
}
