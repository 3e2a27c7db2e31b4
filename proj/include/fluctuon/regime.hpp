#pragma once

#include <string>

#include "fluctuon/kernel.hpp"
#include "fluctuon/params.hpp"

namespace fluctuon {

enum class RegimeId { ReactionDirichlet, ReactionDiffusionDirichlet, HeatDirichlet, HeatRobin, HeatNeumann };
enum class Space { S, S_Dir, S_Rob, S_Neu, Plumbing };
enum class SemigroupKind { Multiplier, SpectralReactionDiffusion, DirichletHeat, RobinHeat, NeumannHeat };

struct RegimeSpec {
    RegimeId id;
    double time_exponent;  // Theta(N) = N^time_exponent
    double sigma_hat;
    double kappa_hat;
    double frak_a;
    double frak_b;
    Space test_space;
    SemigroupKind semigroup;

    bool diffusive() const { return sigma_hat > 0; }
    bool reactive() const { return kappa_hat > 0; }
    double time_scale(int N) const;
};

// theta is compared to 2 - gamma and to 1 with this absolute slack
inline constexpr double kThetaTie = 1e-12;

RegimeSpec regime_of(const ModelParams& params, const JumpKernel& kernel);

// 2 m kappa / sigma^2, the Robin coupling of the test space
double robin_coupling(const ModelParams& params, const JumpKernel& kernel);

std::string to_string(RegimeId id);
std::string to_string(Space s);
std::string to_string(SemigroupKind k);

}  // namespace fluctuon
