#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fluctuon/spectral.hpp"

namespace fluctuon {

namespace {

std::vector<double> trapezoid(int M) {
    std::vector<double> w(M + 1, 1.0 / M);
    w[0] = w[M] = 0.5 / M;
    return w;
}

}  // namespace

Semigroup Semigroup::make(const ModelParams& prm, std::shared_ptr<const JumpKernel> k, int M, int n_max) {
    const SemigroupKind kind = regime_of(prm, *k).semigroup;
    return make(kind, prm, std::move(k), M, n_max);
}

Semigroup Semigroup::make(SemigroupKind kind, const ModelParams& prm, std::shared_ptr<const JumpKernel> k, int M,
                          int n_max) {
    if (M < 64) throw std::invalid_argument("Semigroup: M must be at least 64");
    if (kind != SemigroupKind::Multiplier && (n_max < 1 || n_max > M / 4))
        throw std::invalid_argument("Semigroup: n_max must lie in [1, M/4]");
    Semigroup S;
    S.kind_ = kind;
    S.M_ = M;
    S.grid_.resize(M + 1);
    for (int j = 0; j <= M; ++j) S.grid_[j] = static_cast<double>(j) / M;
    S.weights_ = trapezoid(M);
    const double half_var = 0.5 * k->sigma2;
    const double pi = std::numbers::pi;

    switch (kind) {
        case SemigroupKind::Multiplier: {
            ContinuumProfiles prof(*k);
            S.potential_.assign(M + 1, INFINITY);
            for (int j = 1; j < M; ++j) S.potential_[j] = prm.kappa * prof.V1(S.grid_[j]);
            return S;
        }
        case SemigroupKind::SpectralReactionDiffusion: {
            auto B = std::make_shared<SpectralBasis>(eigensolve(discretize_A(prm, *k, M), n_max));
            S.rates_ = B->eigenvalues;
            S.modes_ = B->vectors;
            S.basis_ = B;
            break;
        }
        case SemigroupKind::DirichletHeat:
            for (int n = 1; n <= n_max; ++n) {
                std::vector<double> v(M + 1);
                for (int j = 0; j <= M; ++j) v[j] = std::sqrt(2.0) * std::sin(n * pi * S.grid_[j]);
                v[0] = v[M] = 0.0;
                S.modes_.push_back(v);
                S.rates_.push_back(half_var * (n * pi) * (n * pi));
            }
            break;
        case SemigroupKind::NeumannHeat:
            for (int n = 0; n < n_max; ++n) {
                std::vector<double> v(M + 1);
                for (int j = 0; j <= M; ++j) v[j] = n == 0 ? 1.0 : std::sqrt(2.0) * std::cos(n * pi * S.grid_[j]);
                S.modes_.push_back(v);
                S.rates_.push_back(half_var * (n * pi) * (n * pi));
            }
            break;
        case SemigroupKind::RobinHeat: {
            const double rk = robin_coupling(prm, *k);
            for (int n = 1; n <= n_max; ++n) {
                TestFunction f = make_basis(Space::S_Rob, n, rk);
                RobinMode rm = robin_mode(n, rk);
                std::vector<double> v(M + 1);
                for (int j = 0; j <= M; ++j) v[j] = f(S.grid_[j]);
                S.modes_.push_back(v);
                S.rates_.push_back(half_var * rm.omega * rm.omega);
            }
            break;
        }
    }

    // weighted Gram matrix of the sampled modes; the projection is exact on their span
    const int n = static_cast<int>(S.modes_.size());
    Eigen::MatrixXd G(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b <= a; ++b) G(a, b) = G(b, a) = S.dot(S.modes_[a], S.modes_[b]);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw std::runtime_error("Semigroup: Gram matrix not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    S.gram_chol_.assign(L.data(), L.data() + n * n);
    return S;
}

std::vector<double> Semigroup::sample(const TestFunction& H) const {
    std::vector<double> v(M_ + 1);
    for (int j = 0; j <= M_; ++j) v[j] = H(grid_[j]);
    return v;
}

double Semigroup::dot(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0;
    for (int j = 0; j <= M_; ++j) s += weights_[j] * a[j] * b[j];
    return s;
}

double Semigroup::norm(const std::vector<double>& v) const { return std::sqrt(dot(v, v)); }

Expansion Semigroup::expand(const std::vector<double>& values) const {
    if (static_cast<int>(values.size()) != M_ + 1)
        throw std::invalid_argument("Semigroup: expected " + std::to_string(M_ + 1) + " grid values");
    Expansion e;
    if (kind_ == SemigroupKind::Multiplier) {
        e.coeffs = values;
        return e;
    }
    const int n = static_cast<int>(modes_.size());
    Eigen::VectorXd b(n);
    for (int a = 0; a < n; ++a) b(a) = dot(modes_[a], values);
    Eigen::Map<const Eigen::MatrixXd> L(gram_chol_.data(), n, n);
    Eigen::VectorXd c = L.triangularView<Eigen::Lower>().solve(b);
    L.transpose().triangularView<Eigen::Upper>().solveInPlace(c);
    e.coeffs.assign(c.data(), c.data() + n);
    e.tail_mass = std::max(0.0, dot(values, values) - c.dot(b));
    return e;
}

std::vector<double> Semigroup::synthesize(const Expansion& e, double t) const {
    if (t < 0) throw std::invalid_argument("Semigroup: negative time");
    std::vector<double> out(M_ + 1, 0.0);
    if (kind_ == SemigroupKind::Multiplier) {
        for (int j = 0; j <= M_; ++j) out[j] = t == 0 ? e.coeffs[j] : e.coeffs[j] * std::exp(-t * potential_[j]);
        return out;
    }
    for (size_t a = 0; a < modes_.size(); ++a) {
        double w = e.coeffs[a] * std::exp(-rates_[a] * t);
        for (int j = 0; j <= M_; ++j) out[j] += w * modes_[a][j];
    }
    return out;
}

std::vector<double> Semigroup::apply(const std::vector<double>& values, double t, double* tail_mass) const {
    if (t < 0) throw std::invalid_argument("Semigroup: negative time");
    Expansion e = expand(values);
    if (tail_mass) *tail_mass = e.tail_mass;
    return synthesize(e, t);
}

std::vector<double> Semigroup::apply(const TestFunction& H, double t, double* tail_mass) const {
    return apply(sample(H), t, tail_mass);
}

std::vector<double> Semigroup::generator(const Expansion& e, double t) const {
    if (t < 0) throw std::invalid_argument("Semigroup: negative time");
    std::vector<double> out(M_ + 1, 0.0);
    if (kind_ == SemigroupKind::Multiplier) {
        for (int j = 1; j < M_; ++j) out[j] = -potential_[j] * e.coeffs[j] * std::exp(-t * potential_[j]);
        return out;
    }
    for (size_t a = 0; a < modes_.size(); ++a) {
        double w = -rates_[a] * e.coeffs[a] * std::exp(-rates_[a] * t);
        for (int j = 0; j <= M_; ++j) out[j] += w * modes_[a][j];
    }
    return out;
}

std::vector<double> generator_apply(const ModelParams& prm, const JumpKernel& k, const TestFunction& H, int M) {
    if (M < 2) throw std::invalid_argument("generator_apply: M must be at least 2");
    const double crit = 2.0 - prm.gamma;
    const bool diff = prm.theta >= crit - kThetaTie;
    const bool react = prm.theta <= crit + kThetaTie;
    if (diff && H.max_order() < 2)
        throw std::invalid_argument("generator_apply: " + H.name() + " is not twice differentiable");
    ContinuumProfiles prof(k);
    std::vector<double> out(M + 1, 0.0);
    for (int j = 1; j < M; ++j) {
        double u = static_cast<double>(j) / M;
        double v = 0;
        if (diff) v += 0.5 * k.sigma2 * H.deriv(u, 2);
        if (react) v -= prm.kappa * prof.V1(u) * H(u);
        out[j] = v;
    }
    return out;
}

std::vector<double> generator_apply(const ModelParams& prm, const JumpKernel& k, const std::vector<double>& values) {
    const int M = static_cast<int>(values.size()) - 1;
    if (M < 64) throw std::invalid_argument("generator_apply: grid needs M >= 64");
    const double crit = 2.0 - prm.gamma;
    const bool diff = prm.theta >= crit - kThetaTie;
    const bool react = prm.theta <= crit + kThetaTie;
    ContinuumProfiles prof(k);
    std::vector<double> out(M + 1, 0.0);
    const double lap = 0.5 * k.sigma2 * static_cast<double>(M) * M;
    for (int j = 1; j < M; ++j) {
        double v = 0;
        if (diff) v += lap * (values[j - 1] - 2 * values[j] + values[j + 1]);
        if (react) v -= prm.kappa * prof.V1(static_cast<double>(j) / M) * values[j];
        out[j] = v;
    }
    return out;
}

}  // namespace fluctuon
