#include "fluctuon/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fluctuon/boundary.hpp"
#include "fluctuon/csv.hpp"

namespace fluctuon {

namespace {

// rho' = L rho + f on the unknown nodes, L tridiagonal
struct Linear {
    std::vector<double> sub, diag, sup, f;
    int size() const { return static_cast<int>(diag.size()); }
};

std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                           std::vector<double> d) {
    const int n = static_cast<int>(b.size());
    for (int i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

// one step of (I - w dt L) y = (I + (1-w) dt L) x + dt f, w = 1 implicit Euler, w = 1/2 Crank-Nicolson
std::vector<double> theta_step(const Linear& L, const std::vector<double>& x, double dt, double w) {
    const int n = L.size();
    std::vector<double> a(n), b(n), c(n), r(n);
    for (int i = 0; i < n; ++i) {
        a[i] = -w * dt * L.sub[i];
        b[i] = 1.0 - w * dt * L.diag[i];
        c[i] = -w * dt * L.sup[i];
        double lx = L.diag[i] * x[i];
        if (i > 0) lx += L.sub[i] * x[i - 1];
        if (i + 1 < n) lx += L.sup[i] * x[i + 1];
        r[i] = x[i] + (1.0 - w) * dt * lx + dt * L.f[i];
    }
    return thomas(a, b, c, r);
}

}  // namespace

std::string PdeSolution::csv() const {
    CsvWriter w("t,u,rho");
    for (size_t i = 0; i < times.size(); ++i)
        for (int j = 0; j <= M; ++j) w.row(times[i], grid[j], values[i][j]);
    return w.str();
}

double PdeSolution::at(int i, double u) const {
    double s = std::clamp(u, 0.0, 1.0) * M;
    int j = std::min(static_cast<int>(s), M - 1);
    double f = s - j;
    return (1 - f) * values[i][j] + f * values[i][j + 1];
}

Profile step_profile(double left, double right, double at) {
    return [=](double u) { return u <= at ? left : right; };
}

PdeSolution solve_pde(const RegimeSpec& rg, const ModelParams& prm, const JumpKernel& k, const Profile& g,
                      const std::vector<double>& times, int M, double dt) {
    if (M < 8) throw std::invalid_argument("solve_pde: M must be at least 8");
    if (!(dt > 0) || dt > 1.0 / M + 1e-15) throw std::invalid_argument("solve_pde: dt must lie in (0, 1/M]");
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] < 0 || (i > 0 && times[i] < times[i - 1]))
            throw std::invalid_argument("solve_pde: output times must be non-negative and sorted");
    const bool dirichlet = rg.frak_a == 0.0;
    if (dirichlet && rg.frak_b == 0.0) throw std::invalid_argument("solve_pde: boundary rows 0 = 0");
    if (!rg.diffusive() && !dirichlet) throw std::invalid_argument("solve_pde: pure reaction needs Dirichlet rows");

    PdeSolution sol;
    sol.M = M;
    sol.dt = dt;
    sol.times = times;
    sol.grid.resize(M + 1);
    for (int j = 0; j <= M; ++j) sol.grid[j] = static_cast<double>(j) / M;

    std::vector<double> g0(M + 1);
    for (int j = 0; j <= M; ++j) {
        g0[j] = g(sol.grid[j]);
        if (!(g0[j] >= 0.0 && g0[j] <= 1.0)) throw std::invalid_argument("solve_pde: g must map into [0,1]");
    }
    double lo = std::min(prm.alpha, prm.beta), hi = std::max(prm.alpha, prm.beta);
    for (double v : g0) lo = std::min(lo, v), hi = std::max(hi, v);
    auto check = [&](const std::vector<double>& v, double t) {
        for (double x : v) {
            if (!std::isfinite(x)) {
                std::ostringstream m;
                m << "solve_pde: non-finite value at t = " << t;
                throw std::runtime_error(m.str());
            }
            sol.max_principle_excess = std::max({sol.max_principle_excess, lo - x, x - hi});
        }
    };

    ContinuumProfiles prof(k, prm.alpha, prm.beta);

    if (!rg.diffusive()) {
        sol.scheme = "exact-exponential";
        for (double t : times) {
            std::vector<double> v(M + 1);
            v[0] = prm.alpha;
            v[M] = prm.beta;
            for (int j = 1; j < M; ++j) {
                double u = sol.grid[j];
                double V1 = prof.V1(u), bar = prof.V0(u) / V1;
                v[j] = bar + (g0[j] - bar) * std::exp(-t * rg.kappa_hat * V1);
            }
            check(v, t);
            sol.values.push_back(std::move(v));
        }
        return sol;
    }

    sol.scheme = "crank-nicolson";
    const double h2 = 1.0 / (static_cast<double>(M) * M);
    const double s = rg.sigma_hat / h2;
    Linear L;
    int off = 0;  // grid index of the first unknown
    if (dirichlet) {
        off = 1;
        const int n = M - 1;
        L.sub.assign(n, s);
        L.sup.assign(n, s);
        L.diag.assign(n, -2 * s);
        L.f.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double u = sol.grid[i + 1];
            if (rg.reactive()) {
                L.diag[i] -= rg.kappa_hat * prof.V1(u);
                L.f[i] += rg.kappa_hat * prof.V0(u);
            }
        }
        L.f[0] += s * prm.alpha;
        L.f[n - 1] += s * prm.beta;
        L.sub[0] = 0;
        L.sup[n - 1] = 0;
    } else {
        if (rg.reactive()) throw std::invalid_argument("solve_pde: reaction term with Robin/Neumann rows");
        const int n = M + 1;
        const double kr = rg.frak_b / rg.frak_a;
        const double hh = 1.0 / M;
        L.sub.assign(n, s);
        L.sup.assign(n, s);
        L.diag.assign(n, -2 * s);
        L.f.assign(n, 0.0);
        // ghost nodes from rho'(0) = kr (rho(0) - alpha), rho'(1) = kr (beta - rho(1))
        L.sup[0] = 2 * s;
        L.diag[0] = -2 * s - 2 * s * hh * kr;
        L.f[0] = 2 * s * hh * kr * prm.alpha;
        L.sub[n - 1] = 2 * s;
        L.diag[n - 1] = -2 * s - 2 * s * hh * kr;
        L.f[n - 1] = 2 * s * hh * kr * prm.beta;
        L.sub[0] = 0;
        L.sup[n - 1] = 0;
    }

    std::vector<double> x(g0.begin() + off, g0.begin() + off + L.size());
    auto full = [&](const std::vector<double>& y) {
        std::vector<double> v(M + 1);
        if (dirichlet) {
            v[0] = prm.alpha;
            v[M] = prm.beta;
        }
        std::copy(y.begin(), y.end(), v.begin() + off);
        return v;
    };
    double t = 0;
    bool started = false;
    for (double tout : times) {
        double span = tout - t;
        if (span > 0) {
            int steps = static_cast<int>(std::ceil(span / dt - 1e-9));
            double d = span / steps;
            for (int n = 0; n < steps; ++n) {
                x = theta_step(L, x, d, started ? 0.5 : 1.0);
                started = true;
                for (double v : x)
                    if (!std::isfinite(v)) {
                        std::ostringstream m;
                        m << "solve_pde: non-finite value at t = " << t + (n + 1) * d;
                        throw std::runtime_error(m.str());
                    }
            }
            t = tout;
        }
        auto v = full(x);
        check(v, tout);
        sol.values.push_back(std::move(v));
    }
    return sol;
}

Profile stationary_profile(const RegimeSpec& rg, const ModelParams& prm, const JumpKernel& k, const Profile& g) {
    const double a = prm.alpha, b = prm.beta;
    switch (rg.id) {
        case RegimeId::ReactionDirichlet: {
            auto prof = std::make_shared<ContinuumProfiles>(k, a, b);
            return [prof, a, b](double u) {
                if (u <= 0) return a;
                if (u >= 1) return b;
                return prof->V0(u) / prof->V1(u);
            };
        }
        case RegimeId::HeatDirichlet:
            return [a, b](double u) { return a + (b - a) * u; };
        case RegimeId::HeatRobin: {
            const double kr = rg.frak_b / rg.frak_a;
            const double c0 = (b + a * (1 + kr)) / (2 + kr), c1 = kr * (b - a) / (2 + kr);
            return [c0, c1](double u) { return c0 + c1 * u; };
        }
        case RegimeId::HeatNeumann: {
            double mean = 0.5 * (a + b);
            if (g) {
                const int n = 4096;
                mean = 0;
                for (int j = 0; j < n; ++j) mean += g((j + 0.5) / n);
                mean /= n;
            }
            return [mean](double) { return mean; };
        }
        case RegimeId::ReactionDiffusionDirichlet: {
            const int M = 4096;
            ContinuumProfiles prof(k, a, b);
            const double s = rg.sigma_hat * M * M;
            const int n = M - 1;
            std::vector<double> lo(n, -s), di(n), up(n, -s), r(n);
            for (int i = 0; i < n; ++i) {
                double u = static_cast<double>(i + 1) / M;
                di[i] = 2 * s + rg.kappa_hat * prof.V1(u);
                r[i] = rg.kappa_hat * prof.V0(u);
            }
            r[0] += s * a;
            r[n - 1] += s * b;
            auto x = thomas(lo, di, up, r);
            auto v = std::make_shared<std::vector<double>>(M + 1);
            (*v)[0] = a;
            (*v)[M] = b;
            std::copy(x.begin(), x.end(), v->begin() + 1);
            return [v, M](double u) {
                double q = std::clamp(u, 0.0, 1.0) * M;
                int j = std::min(static_cast<int>(q), M - 1);
                double f = q - j;
                return (1 - f) * (*v)[j] + f * (*v)[j + 1];
            };
        }
    }
    throw std::logic_error("stationary_profile: unknown regime");
}

}  // namespace fluctuon
