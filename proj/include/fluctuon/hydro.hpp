#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fluctuon/kernel.hpp"
#include "fluctuon/params.hpp"
#include "fluctuon/regime.hpp"

namespace fluctuon {

using Profile = std::function<double(double)>;

struct PdeSolution {
    int M = 0;
    double dt = 0;
    std::string scheme;
    std::vector<double> grid;                 // u_j = j/M
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[i][j] = rho at times[i], grid[j]
    // largest excursion outside [min(g,alpha,beta), max(g,alpha,beta)], 0 when the bound holds
    double max_principle_excess = 0;
    std::string csv() const;  // t,u,rho
    // rho at time index i, linear in u
    double at(int i, double u) const;
};

// solves d_t rho = [sigma_hat Lap - kappa_hat V1] rho + kappa_hat V0 with the regime's boundary rows
PdeSolution solve_pde(const RegimeSpec& regime, const ModelParams& params, const JumpKernel& kernel, const Profile& g,
                      const std::vector<double>& times, int M, double dt);

// long-time limit; the Neumann case keeps the mass of g (or (alpha+beta)/2 without g)
Profile stationary_profile(const RegimeSpec& regime, const ModelParams& params, const JumpKernel& kernel,
                           const Profile& g = nullptr);

// the step profile used by the hydrodynamic checks
Profile step_profile(double left, double right, double at = 0.5);

}  // namespace fluctuon
