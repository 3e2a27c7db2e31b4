#pragma once

#include <vector>

#include "fluctuon/kernel.hpp"

namespace fluctuon {

// indexed by site x = 1..N-1; entries 0 and N are unused
struct BoundaryRateTables {
    int N = 0;
    std::vector<double> r_minus;
    std::vector<double> r_plus;
    std::vector<double> theta_minus;
    std::vector<double> theta_plus;
};

BoundaryRateTables boundary_tables(const JumpKernel& kernel, int N);

class ContinuumProfiles {
public:
    ContinuumProfiles(const JumpKernel& kernel, double alpha = 0.0, double beta = 0.0);
    ContinuumProfiles(double gamma, double c_gamma, double alpha, double beta);

    double r_minus(double u) const;
    double r_plus(double u) const;
    double V1(double u) const { return r_minus(u) + r_plus(u); }
    double V0(double u) const { return alpha_ * r_minus(u) + beta_ * r_plus(u); }
    double gamma() const { return gamma_; }
    double c() const { return c_; }

private:
    double gamma_, c_, alpha_, beta_;
};

struct TailConvergenceRow {
    int N;
    double sup_minus;
    double sup_plus;
};

std::vector<TailConvergenceRow> tail_convergence_report(const JumpKernel& kernel, const std::vector<int>& Ns,
                                                        double a, double b);

// least-squares slope of log(err) against log(N)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fluctuon
