#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fluctuon/spectral.hpp"

namespace fluctuon {

std::vector<double> SymTridiag::multiply(const std::vector<double>& v) const {
    const int n = size();
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        double s = diag[i] * v[i];
        if (i > 0) s += off[i - 1] * v[i - 1];
        if (i + 1 < n) s += off[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

int SymTridiag::count_below(double x) const {
    const int n = size();
    int count = 0;
    double q = 1.0;
    const double tiny = std::numeric_limits<double>::min();
    for (int i = 0; i < n; ++i) {
        q = diag[i] - x - (i > 0 ? off[i - 1] * off[i - 1] / q : 0.0);
        if (q == 0.0) q = -tiny;
        if (q < 0) ++count;
    }
    return count;
}

SymTridiag discretize_A(const ModelParams& prm, const JumpKernel& k, int M, bool with_diffusion, bool with_potential) {
    if (M < 64) throw std::invalid_argument("discretize_A: M must be at least 64");
    if (prm.kappa < 0) throw std::invalid_argument("discretize_A: kappa must be non-negative");
    ContinuumProfiles prof(k);
    SymTridiag t;
    t.M = M;
    t.diag.assign(M - 1, 0.0);
    t.off.assign(M - 2, 0.0);
    const double lap = with_diffusion ? 0.5 * k.sigma2 * static_cast<double>(M) * M : 0.0;
    for (int j = 1; j < M; ++j) {
        double u = static_cast<double>(j) / M;
        t.diag[j - 1] = 2.0 * lap + (with_potential ? prm.kappa * prof.V1(u) : 0.0);
        if (j < M - 1) t.off[j - 1] = -lap;
    }
    return t;
}

namespace {

// (T - mu) x = b by Gaussian elimination with partial pivoting on the band
std::vector<double> shifted_solve(const SymTridiag& T, double mu, std::vector<double> b) {
    const int n = T.size();
    std::vector<double> lo(T.off), d(n), up(T.off), up2(std::max(n - 2, 0), 0.0);
    std::vector<char> swapped(std::max(n - 1, 0), 0);
    double scale = 0;
    for (int i = 0; i < n; ++i) {
        d[i] = T.diag[i] - mu;
        scale = std::max(scale, std::abs(T.diag[i]) + (i > 0 ? std::abs(T.off[i - 1]) : 0.0));
    }
    const double tiny = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(lo[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            double f = lo[i] / d[i];
            lo[i] = f;
            d[i + 1] -= f * up[i];
        } else {
            double f = d[i] / lo[i];
            d[i] = lo[i];
            lo[i] = f;
            double tmp = up[i];
            up[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if (i + 2 < n) {
                up2[i] = up[i + 1];
                up[i + 1] = -f * up[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    for (int i = 0; i + 1 < n; ++i) {
        if (!swapped[i]) {
            b[i + 1] -= lo[i] * b[i];
        } else {
            double tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - lo[i] * b[i];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        if (i + 1 < n) s -= up[i] * x[i + 1];
        if (i + 2 < n) s -= up2[i] * x[i + 2];
        if (d[i] == 0.0) d[i] = tiny;
        x[i] = s / d[i];
    }
    return x;
}

double euclid(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

SpectralBasis eigensolve(const SymTridiag& op, int n_max) {
    const int n = op.size();
    if (n_max < 1 || n_max > op.M / 4)
        throw std::invalid_argument("eigensolve: n_max must lie in [1, M/4] (got " + std::to_string(n_max) + ")");
    double lo0 = INFINITY, hi0 = -INFINITY;
    for (int i = 0; i < n; ++i) {
        double r = (i > 0 ? std::abs(op.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(op.off[i]) : 0.0);
        lo0 = std::min(lo0, op.diag[i] - r);
        hi0 = std::max(hi0, op.diag[i] + r);
    }
    SpectralBasis B;
    B.M = op.M;
    B.op = op;
    B.grid.resize(op.M + 1);
    for (int j = 0; j <= op.M; ++j) B.grid[j] = static_cast<double>(j) / op.M;
    const double h = 1.0 / op.M;
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<std::vector<double>> raw;
    for (int k = 1; k <= n_max; ++k) {
        double lo = lo0, hi = hi0;
        int it = 0;
        while (hi - lo > 4 * eps * std::max(std::abs(lo), std::abs(hi))) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (op.count_below(mid) >= k) hi = mid;
            else lo = mid;
            if (++it > 400) throw std::runtime_error("eigensolve: bisection did not converge for index " + std::to_string(k));
        }
        double lam = 0.5 * (lo + hi);
        B.eigenvalues.push_back(lam);

        std::vector<double> v(n);
        uint64_t s = 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(k);
        for (int i = 0; i < n; ++i) {
            s = s * 6364136223846793005ull + 1442695040888963407ull;
            v[i] = 0.5 + static_cast<double>(s >> 11) * 0x1.0p-53;
        }
        for (int rep = 0; rep < 3; ++rep) {
            v = shifted_solve(op, lam, v);
            double nv = euclid(v);
            if (!(nv > 0) || !std::isfinite(nv))
                throw std::runtime_error("eigensolve: inverse iteration failed for index " + std::to_string(k));
            for (double& x : v) x /= nv;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& w : raw) {
                double d = 0;
                for (int i = 0; i < n; ++i) d += w[i] * v[i];
                for (int i = 0; i < n; ++i) v[i] -= d * w[i];
            }
            double nv = euclid(v);
            for (double& x : v) x /= nv;
        }
        raw.push_back(v);
    }
    for (size_t k = 1; k < B.eigenvalues.size(); ++k)
        if (!(B.eigenvalues[k] > B.eigenvalues[k - 1]))
            throw std::runtime_error("eigensolve: eigenvalues not separated at index " + std::to_string(k + 1));

    for (auto& v : raw) {
        double vmax = 0;
        for (double x : v) vmax = std::max(vmax, std::abs(x));
        for (double x : v) {
            if (std::abs(x) > 1e-8 * vmax) {
                if (x < 0)
                    for (double& y : v) y = -y;
                break;
            }
        }
        std::vector<double> full(op.M + 1, 0.0);
        for (int i = 0; i < n; ++i) full[i + 1] = v[i] / std::sqrt(h);
        B.vectors.push_back(std::move(full));
    }
    return B;
}

TurningPoint turning_point(const SpectralBasis& B, int n, const ModelParams& prm, const JumpKernel& k) {
    if (n < 1 || n > static_cast<int>(B.eigenvalues.size()))
        throw std::out_of_range("turning_point: mode index outside the basis");
    ContinuumProfiles prof(k);
    const double lam = B.eigenvalues[n - 1];
    auto g = [&](double u) { return prm.kappa * prof.V1(u) - lam; };
    if (!(g(0.5) < 0))
        throw std::domain_error("turning_point: lambda_" + std::to_string(n) + " lies below the potential minimum");
    double lo = 1e-12, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    TurningPoint tp;
    tp.u = 0.5 * (lo + hi);
    tp.product = tp.u * std::pow(lam, 1.0 / k.gamma);
    tp.target = std::pow(prm.kappa * k.c_gamma / k.gamma, 1.0 / k.gamma);
    tp.residual = std::abs(g(tp.u)) / lam;
    return tp;
}

DecayFit boundary_decay_report(const SpectralBasis& B, int n, double u_max) {
    if (n < 1 || n > static_cast<int>(B.vectors.size()))
        throw std::out_of_range("boundary_decay_report: mode index outside the basis");
    const auto& v = B.vectors[n - 1];
    std::vector<double> xs, ys;
    for (int j = 1; j < B.M && B.grid[j] <= u_max; ++j) {
        double a = std::abs(v[j]);
        if (a > 1e-280) {
            xs.push_back(B.grid[j]);
            ys.push_back(a);
        }
    }
    if (xs.size() < 8)
        throw std::runtime_error("boundary_decay_report: only " + std::to_string(xs.size()) +
                                 " resolved grid points below u = " + std::to_string(u_max));
    return {loglog_slope(xs, ys), static_cast<int>(xs.size()), u_max};
}

double laplacian_slack(int n, int M) {
    const double a = std::numbers::pi * n;
    return 1.0 - (2.0 * M * M / (a * a)) * (1.0 - std::cos(a / M));
}

}  // namespace fluctuon
