#pragma once

#include <string>
#include <vector>

namespace fluctuon {

struct ModelParams {
    int N = 64;
    double gamma = 3.0;
    double theta = 0.0;
    double kappa = 1.0;
    double alpha = 0.5;
    double beta = 0.5;
    double rho = 0.5;

    // empty when valid
    std::vector<std::string> problems() const;
    void validate() const;
    bool equilibrium() const { return alpha == beta && beta == rho; }
    double chi() const { return rho * (1.0 - rho); }
};

}  // namespace fluctuon
