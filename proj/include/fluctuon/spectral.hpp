#pragma once

#include <memory>
#include <vector>

#include "fluctuon/boundary.hpp"
#include "fluctuon/kernel.hpp"
#include "fluctuon/params.hpp"
#include "fluctuon/regime.hpp"
#include "fluctuon/test_function.hpp"

namespace fluctuon {

// Symmetric tridiagonal matrix, the positive operator -A_h on interior nodes u_j = j/M, j = 1..M-1.
struct SymTridiag {
    int M = 0;
    std::vector<double> diag;  // size M-1
    std::vector<double> off;   // size M-2, off[i] couples i and i+1
    int size() const { return static_cast<int>(diag.size()); }
    std::vector<double> multiply(const std::vector<double>& v) const;
    // number of eigenvalues strictly below x
    int count_below(double x) const;
};

// (sigma^2/2) * 3-point Laplacian minus kappa V1, stored with the sign flipped
SymTridiag discretize_A(const ModelParams& params, const JumpKernel& kernel, int M, bool with_diffusion = true,
                        bool with_potential = true);

struct SpectralBasis {
    int M = 0;
    std::vector<double> grid;                   // u_j, j = 0..M
    std::vector<double> eigenvalues;            // lambda_1 < lambda_2 < ...
    std::vector<std::vector<double>> vectors;   // psi_n on the full grid, zero at both ends
    SymTridiag op;
};

SpectralBasis eigensolve(const SymTridiag& op, int n_max);

struct TurningPoint {
    double u;
    double product;  // u * lambda^(1/gamma)
    double target;   // (kappa c / gamma)^(1/gamma)
    double residual;
};

TurningPoint turning_point(const SpectralBasis& basis, int n, const ModelParams& params, const JumpKernel& kernel);

struct DecayFit {
    double slope;
    int points;
    double u_max;
};

// log-log slope of |psi_n| on (0, u_max]
DecayFit boundary_decay_report(const SpectralBasis& basis, int n, double u_max);

// the Laplacian grid deficit 1 - (2M^2/(pi n)^2)(1 - cos(pi n/M))
double laplacian_slack(int n, int M);

// ---- semigroups ----

struct Expansion {
    std::vector<double> coeffs;  // modes, or grid values for the multiplier kind
    double tail_mass = 0;        // L2 mass not captured by the retained modes
};

class Semigroup {
public:
    static Semigroup make(const ModelParams& params, std::shared_ptr<const JumpKernel> kernel, int M, int n_max);
    static Semigroup make(SemigroupKind kind, const ModelParams& params, std::shared_ptr<const JumpKernel> kernel,
                          int M, int n_max);

    SemigroupKind kind() const { return kind_; }
    int M() const { return M_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& rates() const { return rates_; }

    std::vector<double> sample(const TestFunction& H) const;
    Expansion expand(const std::vector<double>& values) const;
    std::vector<double> synthesize(const Expansion& e, double t) const;
    std::vector<double> apply(const std::vector<double>& values, double t, double* tail_mass = nullptr) const;
    std::vector<double> apply(const TestFunction& H, double t, double* tail_mass = nullptr) const;
    // A P_t applied to the expansion
    std::vector<double> generator(const Expansion& e, double t) const;

    double norm(const std::vector<double>& v) const;
    double dot(const std::vector<double>& a, const std::vector<double>& b) const;

private:
    Semigroup() = default;
    SemigroupKind kind_{};
    int M_ = 0;
    std::vector<double> grid_;
    std::vector<double> weights_;                 // trapezoid
    std::vector<double> rates_;                   // lambda_n
    std::vector<std::vector<double>> modes_;      // sampled on the grid
    std::vector<double> gram_chol_;               // Cholesky factor of the weighted Gram matrix
    std::vector<double> potential_;               // kappa V1 on interior nodes (multiplier)
    std::shared_ptr<const SpectralBasis> basis_;  // spectral kind
};

// A_theta H on the grid u_j = j/M (interior nodes; endpoint entries 0)
std::vector<double> generator_apply(const ModelParams& params, const JumpKernel& kernel, const TestFunction& H, int M);
std::vector<double> generator_apply(const ModelParams& params, const JumpKernel& kernel,
                                    const std::vector<double>& values);

}  // namespace fluctuon
