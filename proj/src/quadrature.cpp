#include "fluctuon/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace fluctuon {

double gauss_on_mesh(const std::function<double(double)>& f, const std::vector<double>& mesh) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    double s = 0;
    for (size_t i = 0; i + 1 < mesh.size(); ++i) {
        if (mesh[i + 1] <= mesh[i]) continue;
        s += rule::integrate(f, mesh[i], mesh[i + 1]);
    }
    return s;
}

std::vector<double> graded_mesh(int P, double q, const std::vector<double>& breaks) {
    std::vector<double> m;
    m.reserve(2 * P + 1 + breaks.size());
    for (int j = 0; j <= P; ++j) {
        double s = 0.5 * std::pow(static_cast<double>(j) / P, q);
        m.push_back(s);
        m.push_back(1.0 - s);
    }
    for (double b : breaks)
        if (b > 0.0 && b < 1.0) m.push_back(b);
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

QuadResult integrate_unit(const std::function<double(double)>& f, const std::vector<double>& breaks, double q,
                          double tol, int max_panels) {
    QuadResult r;
    int P = 16;
    double prev = gauss_on_mesh(f, graded_mesh(P, q, breaks));
    while (P < max_panels) {
        P *= 2;
        double cur = gauss_on_mesh(f, graded_mesh(P, q, breaks));
        r.value = cur;
        r.change = std::abs(cur - prev);
        r.panels = P;
        if (!std::isfinite(cur)) return r;
        if (r.change <= tol * std::max(1.0, std::abs(cur))) {
            r.converged = true;
            return r;
        }
        prev = cur;
    }
    return r;
}

}  // namespace fluctuon
