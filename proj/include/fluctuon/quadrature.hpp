#pragma once

#include <functional>
#include <vector>

namespace fluctuon {

struct QuadResult {
    double value = 0;
    double change = 0;  // |I(2P) - I(P)| at the last refinement
    int panels = 0;
    bool converged = false;
};

// Sum of 10-point Gauss-Legendre rules over consecutive intervals of `mesh`.
double gauss_on_mesh(const std::function<double(double)>& f, const std::vector<double>& mesh);

// Mesh on [0,1] with panel ends (j/P)^q / 2 near each endpoint, merged with `breaks`.
std::vector<double> graded_mesh(int P, double q, const std::vector<double>& breaks);

// Integral over [0,1], refined by doubling P until the change drops below tol.
QuadResult integrate_unit(const std::function<double(double)>& f, const std::vector<double>& breaks = {},
                          double q = 3.0, double tol = 1e-10, int max_panels = 1 << 14);

}  // namespace fluctuon
