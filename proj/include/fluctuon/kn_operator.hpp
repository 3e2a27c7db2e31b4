#pragma once

#include <vector>

#include "fluctuon/kernel.hpp"
#include "fluctuon/test_function.hpp"

namespace fluctuon {

// N^2 (K_N H)(x/N) for x = 0..N (entries 0 and N unused). Functions tagged S are zero-extended;
// anything else must carry an extension rule.
std::vector<double> apply_KN(const JumpKernel& kernel, const TestFunction& H, int N);

// (L_N H)(x) = sum_{y in Lambda_N} p(y-x)(H(y) - H(x)) on lattice values h[1..N-1], unscaled
std::vector<double> lattice_generator(const JumpKernel& kernel, const std::vector<double>& h, int N);

struct KnErrorRow {
    int N;
    double sup_error;       // over all of Lambda_N
    double interior_error;  // over x/N in [1/4, 3/4]
    int argmax;
};

KnErrorRow kn_error(const JumpKernel& kernel, const TestFunction& H, int N);

}  // namespace fluctuon
