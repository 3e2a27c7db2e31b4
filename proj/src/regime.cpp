#include "fluctuon/regime.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fluctuon {

std::vector<std::string> ModelParams::problems() const {
    std::vector<std::string> out;
    auto unit = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " must lie in [0,1]");
    };
    if (N < 2) out.push_back("N must be at least 2");
    if (!(gamma > 2.0)) out.push_back("gamma must exceed 2");
    if (!std::isfinite(theta)) out.push_back("theta must be finite");
    if (!(kappa > 0.0)) out.push_back("kappa must be positive");
    unit(alpha, "alpha");
    unit(beta, "beta");
    unit(rho, "rho");
    return out;
}

void ModelParams::validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::ostringstream os;
    for (size_t i = 0; i < p.size(); ++i) os << (i ? "; " : "") << p[i];
    throw std::invalid_argument(os.str());
}

double RegimeSpec::time_scale(int N) const { return std::pow(static_cast<double>(N), time_exponent); }

RegimeSpec regime_of(const ModelParams& prm, const JumpKernel& k) {
    const double crit = 2.0 - prm.gamma;
    const double half_var = k.sigma2 / 2.0;
    RegimeSpec r{};
    if (prm.theta < crit - kThetaTie) {
        r = {RegimeId::ReactionDirichlet, prm.gamma + prm.theta, 0.0, prm.kappa, 0.0, 1.0, Space::S,
             SemigroupKind::Multiplier};
    } else if (std::abs(prm.theta - crit) <= kThetaTie) {
        r = {RegimeId::ReactionDiffusionDirichlet, 2.0, half_var, prm.kappa, 0.0, 1.0, Space::S,
             SemigroupKind::SpectralReactionDiffusion};
    } else if (prm.theta < 1.0 - kThetaTie) {
        r = {RegimeId::HeatDirichlet, 2.0, half_var, 0.0, 0.0, 1.0, Space::S, SemigroupKind::DirichletHeat};
    } else if (std::abs(prm.theta - 1.0) <= kThetaTie) {
        r = {RegimeId::HeatRobin, 2.0, half_var, 0.0, half_var, k.m * prm.kappa, Space::S_Rob,
             SemigroupKind::RobinHeat};
    } else {
        r = {RegimeId::HeatNeumann, 2.0, half_var, 0.0, 1.0, 0.0, Space::S_Neu, SemigroupKind::NeumannHeat};
    }
    return r;
}

double robin_coupling(const ModelParams& prm, const JumpKernel& k) { return 2.0 * k.m * prm.kappa / k.sigma2; }

std::string to_string(RegimeId id) {
    switch (id) {
        case RegimeId::ReactionDirichlet: return "ReactionDirichlet";
        case RegimeId::ReactionDiffusionDirichlet: return "ReactionDiffusionDirichlet";
        case RegimeId::HeatDirichlet: return "HeatDirichlet";
        case RegimeId::HeatRobin: return "HeatRobin";
        case RegimeId::HeatNeumann: return "HeatNeumann";
    }
    return "?";
}

std::string to_string(Space s) {
    switch (s) {
        case Space::S: return "S";
        case Space::S_Dir: return "S_Dir";
        case Space::S_Rob: return "S_Rob";
        case Space::S_Neu: return "S_Neu";
        case Space::Plumbing: return "Plumbing";
    }
    return "?";
}

std::string to_string(SemigroupKind k) {
    switch (k) {
        case SemigroupKind::Multiplier: return "Multiplier";
        case SemigroupKind::SpectralReactionDiffusion: return "SpectralReactionDiffusion";
        case SemigroupKind::DirichletHeat: return "DirichletHeat";
        case SemigroupKind::RobinHeat: return "RobinHeat";
        case SemigroupKind::NeumannHeat: return "NeumannHeat";
    }
    return "?";
}

}  // namespace fluctuon
