#include "fluctuon/kn_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace fluctuon {

std::vector<double> apply_KN(const JumpKernel& k, const TestFunction& H, int N) {
    if (N < 2) throw std::invalid_argument("apply_KN: N must be at least 2");
    Extension ext = H.extension();
    if (H.space() == Space::S && ext == Extension::None) ext = Extension::ZeroOutside;
    if (ext == Extension::None) throw std::invalid_argument("apply_KN: " + H.name() + " has no extension rule");
    TestFunction Hx = H.with_extension(ext);

    std::vector<double> out(N + 1, 0.0);
    if (ext == Extension::ZeroOutside) {
        std::vector<double> h(N + 1);
        for (int y = 0; y <= N; ++y) h[y] = Hx(static_cast<double>(y) / N);
        for (int x = 1; x < N; ++x) {
            double s = 0;
            for (int y = 0; y <= N; ++y) s += k.p(y - x) * (h[y] - h[x]);
            // every y outside [0,N] contributes p(y-x)(0 - H(x))
            s -= h[x] * (k.tail(x + 1) + k.tail(N + 1 - x));
            out[x] = static_cast<double>(N) * N * s;
        }
        return out;
    }
    // reflected extension: explicit on [-N, 2N], constant beyond
    std::vector<double> h(3 * N + 1);
    for (int y = -N; y <= 2 * N; ++y) h[y + N] = Hx.extended(static_cast<double>(y) / N);
    const double left = h[0], right = h[3 * N];
    for (int x = 1; x < N; ++x) {
        double s = 0;
        for (int y = -N; y <= 2 * N; ++y) s += k.p(y - x) * (h[y + N] - h[x + N]);
        s += (left - h[x + N]) * k.tail(x + N + 1);
        s += (right - h[x + N]) * k.tail(2 * N + 1 - x);
        out[x] = static_cast<double>(N) * N * s;
    }
    return out;
}

std::vector<double> lattice_generator(const JumpKernel& k, const std::vector<double>& h, int N) {
    std::vector<double> out(N + 1, 0.0);
    for (int x = 1; x < N; ++x) {
        double s = 0;
        for (int y = 1; y < N; ++y)
            if (y != x) s += k.p(y - x) * (h[y] - h[x]);
        out[x] = s;
    }
    return out;
}

KnErrorRow kn_error(const JumpKernel& k, const TestFunction& H, int N) {
    auto v = apply_KN(k, H, N);
    KnErrorRow r{N, 0.0, 0.0, 0};
    for (int x = 1; x < N; ++x) {
        double u = static_cast<double>(x) / N;
        double e = std::abs(v[x] - 0.5 * k.sigma2 * H.deriv(u, 2));
        if (e > r.sup_error) {
            r.sup_error = e;
            r.argmax = x;
        }
        if (u >= 0.25 && u <= 0.75) r.interior_error = std::max(r.interior_error, e);
    }
    return r;
}

}  // namespace fluctuon
