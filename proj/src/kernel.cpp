#include "fluctuon/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fluctuon {

namespace {

constexpr long kHead = 1000;

// Euler-Maclaurin remainder terms for f(y) = y^-s at y = z; returns the
// magnitude of the first omitted term through *omitted
double em_tail(double s, double z, double* omitted) {
    // B_{2k}/(2k)! for k = 1..5
    static const double b[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
                               1.0 / 47900160.0};
    double sum = std::pow(z, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(z, -s);
    // f^(2k-1)(z) = -s(s+1)...(s+2k-2) z^-(s+2k-1)
    double rising = s;
    double zp = std::pow(z, -s - 1.0);
    for (int k = 0; k < 4; ++k) {
        sum -= b[k] * (-rising * zp);
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
        zp /= z * z;
    }
    if (omitted) *omitted = std::abs(b[4] * rising * zp);
    return sum;
}

}  // namespace

double power_tail_sum(double s, long z) {
    if (s <= 1.0) throw std::invalid_argument("power_tail_sum: exponent must exceed 1");
    if (z < 1) throw std::invalid_argument("power_tail_sum: start must be positive");
    if (z >= kHead) return em_tail(s, static_cast<double>(z), nullptr);
    double head = 0;
    for (long y = kHead - 1; y >= z; --y) head += std::pow(static_cast<double>(y), -s);
    return head + em_tail(s, static_cast<double>(kHead), nullptr);
}

double zeta_sum(double s, double* error_bound) {
    double omitted = 0;
    double tail = em_tail(s, static_cast<double>(kHead), &omitted);
    double head = 0;
    for (long y = kHead - 1; y >= 1; --y) head += std::pow(static_cast<double>(y), -s);
    if (error_bound) *error_bound = omitted + 1e-16 * (head + tail);
    return head + tail;
}

double JumpKernel::p(long z) const {
    if (z == 0) return 0.0;
    long a = z < 0 ? -z : z;
    if (a <= z_max) return p_table[a];
    return c_gamma * std::pow(static_cast<double>(a), -(gamma + 1.0));
}

double JumpKernel::tail(long z) const {
    if (z <= 0) return 1.0 - tail(1 - z);
    if (z <= z_max + 1) return tail_cdf[z];
    return c_gamma * power_tail_sum(gamma + 1.0, z);
}

double JumpKernel::tail_moment(long z) const {
    if (z < 1) throw std::invalid_argument("tail_moment: z must be >= 1");
    if (z <= z_max + 1) return tail_first[z];
    return c_gamma * power_tail_sum(gamma, z);
}

double JumpKernel::normalization_defect() const {
    double s = 0;
    for (long z = z_max; z >= 1; --z) s += p_table[z];
    s += tail_cdf[z_max + 1];
    return std::abs(2.0 * s - 1.0);
}

JumpKernel build_kernel(double gamma, long z_max) {
    if (!(gamma > 2.0))
        throw std::invalid_argument("gamma must exceed 2 (got " + std::to_string(gamma) + ")");
    if (z_max < 1000) throw std::invalid_argument("z_max must be at least 1000");

    JumpKernel k;
    k.gamma = gamma;
    k.z_max = z_max;
    double e0 = 0, e1 = 0, e2 = 0;
    double z0 = zeta_sum(gamma + 1.0, &e0);
    double z1 = zeta_sum(gamma, &e1);
    double z2 = zeta_sum(gamma - 1.0, &e2);
    k.c_gamma = 1.0 / (2.0 * z0);
    k.sigma2 = 2.0 * k.c_gamma * z2;
    k.m = k.c_gamma * z1;
    k.series_error = std::max({e0 / z0, e1 / z1, e2 / z2});

    k.p_table.assign(z_max + 1, 0.0);
    for (long z = 1; z <= z_max; ++z)
        k.p_table[z] = k.c_gamma * std::pow(static_cast<double>(z), -(gamma + 1.0));

    k.tail_cdf.assign(z_max + 2, 0.0);
    k.tail_first.assign(z_max + 2, 0.0);
    k.tail_cdf[z_max + 1] = k.c_gamma * power_tail_sum(gamma + 1.0, z_max + 1);
    k.tail_first[z_max + 1] = k.c_gamma * power_tail_sum(gamma, z_max + 1);
    for (long z = z_max; z >= 1; --z) {
        k.tail_cdf[z] = k.tail_cdf[z + 1] + k.p_table[z];
        k.tail_first[z] = k.tail_first[z + 1] + static_cast<double>(z) * k.p_table[z];
    }
    // symmetry pins this to 1/2; the recursion lands within a few ulps
    k.tail_cdf[1] = 0.5;
    return k;
}

}  // namespace fluctuon
