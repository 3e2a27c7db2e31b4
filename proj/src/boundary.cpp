#include "fluctuon/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fluctuon {

BoundaryRateTables boundary_tables(const JumpKernel& k, int N) {
    if (N < 2) throw std::invalid_argument("boundary_tables: N must be at least 2");
    BoundaryRateTables t;
    t.N = N;
    t.r_minus.assign(N + 1, 0.0);
    t.r_plus.assign(N + 1, 0.0);
    t.theta_minus.assign(N + 1, 0.0);
    t.theta_plus.assign(N + 1, 0.0);
    for (int x = 1; x < N; ++x) {
        t.r_minus[x] = k.tail(x);
        t.r_plus[x] = k.tail(N - x);
        t.theta_minus[x] = -k.tail_moment(x);
        t.theta_plus[x] = k.tail_moment(N - x);
    }
    return t;
}

ContinuumProfiles::ContinuumProfiles(const JumpKernel& k, double alpha, double beta)
    : ContinuumProfiles(k.gamma, k.c_gamma, alpha, beta) {}

ContinuumProfiles::ContinuumProfiles(double gamma, double c_gamma, double alpha, double beta)
    : gamma_(gamma), c_(c_gamma), alpha_(alpha), beta_(beta) {}

double ContinuumProfiles::r_minus(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("boundary profile evaluated outside (0,1)");
    return c_ / gamma_ * std::pow(u, -gamma_);
}

double ContinuumProfiles::r_plus(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("boundary profile evaluated outside (0,1)");
    return c_ / gamma_ * std::pow(1.0 - u, -gamma_);
}

std::vector<TailConvergenceRow> tail_convergence_report(const JumpKernel& k, const std::vector<int>& Ns, double a,
                                                        double b) {
    if (!(a > 0.0 && a < b && b < 1.0)) throw std::invalid_argument("tail_convergence_report: need 0 < a < b < 1");
    ContinuumProfiles prof(k);
    std::vector<TailConvergenceRow> rows;
    for (int N : Ns) {
        auto t = boundary_tables(k, N);
        int lo = static_cast<int>(std::ceil(a * N)), hi = static_cast<int>(std::floor(b * N));
        if (lo > hi) throw std::invalid_argument("tail_convergence_report: window holds no site");
        double scale = std::pow(static_cast<double>(N), k.gamma);
        TailConvergenceRow row{N, 0.0, 0.0};
        for (int x = lo; x <= hi; ++x) {
            double u = static_cast<double>(x) / N;
            row.sup_minus = std::max(row.sup_minus, std::abs(scale * t.r_minus[x] - prof.r_minus(u)));
            row.sup_plus = std::max(row.sup_plus, std::abs(scale * t.r_plus[x] - prof.r_plus(u)));
        }
        rows.push_back(row);
    }
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fluctuon
