#pragma once

#include <vector>

namespace fluctuon {

// p(z) = c |z|^-(gamma+1), tabulated up to z_max, power-law tail beyond.
struct JumpKernel {
    double gamma = 0;
    double c_gamma = 0;
    double sigma2 = 0;
    double m = 0;
    long z_max = 0;
    // bound on the error of the zeta-type sums behind c, sigma2, m
    double series_error = 0;

    std::vector<double> p_table;     // [z], z = 0..z_max, p_table[0] = 0
    std::vector<double> tail_cdf;    // [z] = sum_{y>=z} p(y), z = 1..z_max+1
    std::vector<double> tail_first;  // [z] = sum_{y>=z} y p(y)

    double p(long z) const;
    // sum_{y>=z} p(y); for z <= 0 the mass on both sides is included
    double tail(long z) const;
    // sum_{y>=z} y p(y), z >= 1
    double tail_moment(long z) const;
    // |sum_z p(z) - 1| recomputed from the tables
    double normalization_defect() const;
};

JumpKernel build_kernel(double gamma, long z_max = 4096);

// sum_{y>=z} y^-s by Euler-Maclaurin, accurate for z >= ~100
double power_tail_sum(double s, long z);
// sum_{y>=1} y^-s
double zeta_sum(double s, double* error_bound = nullptr);

}  // namespace fluctuon
