#include "fluctuon/fluct.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fluctuon/csv.hpp"
#include "fluctuon/kn_operator.hpp"

namespace fluctuon {

std::vector<double> lattice_values(const TestFunction& H, int N) {
    std::vector<double> h(N + 1, 0.0);
    for (int x = 1; x < N; ++x) h[x] = H(static_cast<double>(x) / N);
    return h;
}

double fluct_field(const std::vector<uint8_t>& eta, const std::vector<double>& h, double rho) {
    const int N = static_cast<int>(eta.size()) - 1;
    if (static_cast<int>(h.size()) != N + 1) throw std::invalid_argument("fluct_field: size mismatch");
    double s = 0;
    for (int x = 1; x < N; ++x) s += h[x] * (eta[x] - rho);
    return s / std::sqrt(static_cast<double>(N - 1));
}

double fluct_field(const std::vector<uint8_t>& eta, const TestFunction& H, double rho) {
    const int N = static_cast<int>(eta.size()) - 1;
    return fluct_field(eta, lattice_values(H, N), rho);
}

GammaParts carre_du_champ(const std::vector<uint8_t>& eta, const std::vector<double>& h, const SimContext& c) {
    const int N = c.params.N;
    const JumpKernel& k = *c.kernel;
    GammaParts g;
    double ordered = 0;
    for (int x = 1; x < N; ++x)
        for (int y = x + 1; y < N; ++y) {
            if (eta[x] == eta[y]) continue;
            double d = h[x] - h[y];
            ordered += k.p(y - x) * d * d;
        }
    g.exchange = c.theta_N * ordered / (N - 1);
    double res = 0, res_lit = 0;
    const double a = c.params.alpha, b = c.params.beta, rho = c.params.rho;
    for (int x = 1; x < N; ++x) {
        double ca = eta[x] ? 1 - a : a, cb = eta[x] ? 1 - b : b;
        double h2 = h[x] * h[x];
        res += (c.tables.r_minus[x] * ca + c.tables.r_plus[x] * cb) * h2;
        res_lit += (c.tables.r_minus[x] + c.tables.r_plus[x]) * h2 * (rho + (1 - 2 * rho) * eta[x]);
    }
    g.reservoir = c.reservoir_scale * res / (N - 1);
    g.literal = c.theta_N * 2 * ordered / N +
              c.theta_N * c.params.kappa * std::pow(static_cast<double>(N), -1 - c.params.theta) * res_lit;
    return g;
}

double drift(const std::vector<uint8_t>& eta, const std::vector<double>& h, const SimContext& c) {
    const int N = c.params.N;
    auto Lh = lattice_generator(*c.kernel, h, N);
    const double rho = c.params.rho;
    double op = 0, res = 0;
    for (int x = 1; x < N; ++x) {
        op += Lh[x] * (eta[x] - rho);
        res += h[x] * (c.tables.r_minus[x] * (c.params.alpha - eta[x]) + c.tables.r_plus[x] * (c.params.beta - eta[x]));
    }
    return (c.theta_N * op + c.reservoir_scale * res) / std::sqrt(static_cast<double>(N - 1));
}

std::vector<double> window_values(int side, double eps, int N) {
    if (side != 0 && side != 1) throw std::invalid_argument("boundary window: side must be 0 or 1");
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("boundary window: eps must lie in (0,1]");
    const int width = static_cast<int>(std::floor(eps * N + 1e-9));
    if (width < 1) throw std::invalid_argument("boundary window: eps N < 1, window smaller than one site");
    std::vector<double> h(N + 1, 0.0);
    for (int x = 1; x < N; ++x) {
        bool in = side == 0 ? x <= width : x >= N - width;
        if (in) h[x] = 1.0 / eps;
    }
    return h;
}

double boundary_window_field(const std::vector<uint8_t>& eta, int side, double eps, double rho, int N) {
    return fluct_field(eta, window_values(side, eps, N), rho);
}

TrackedFunction track(const std::string& name, const std::vector<double>& h, const SimContext& c) {
    const int N = c.params.N;
    if (static_cast<int>(h.size()) != N + 1) throw std::invalid_argument("track: size mismatch for " + name);
    TrackedFunction f;
    f.name = name;
    f.h = h;
    f.h[0] = f.h[N] = 0;
    auto Lh = lattice_generator(*c.kernel, f.h, N);
    const double s = 1.0 / std::sqrt(static_cast<double>(N - 1));
    const double a = c.params.alpha, b = c.params.beta, rho = c.params.rho;
    f.w.assign(N + 1, 0.0);
    f.gw.assign(N + 1, 0.0);
    for (int x = 1; x < N; ++x) {
        double rm = c.tables.r_minus[x], rp = c.tables.r_plus[x];
        f.w[x] = s * (c.theta_N * Lh[x] - c.reservoir_scale * f.h[x] * (rm + rp));
        f.w0 += s * (-rho * c.theta_N * Lh[x] + c.reservoir_scale * f.h[x] * (a * rm + b * rp));
        double q = c.reservoir_scale * f.h[x] * f.h[x] / (N - 1);
        f.gw[x] = q * (rm * (1 - 2 * a) + rp * (1 - 2 * b));
        f.g0 += q * (rm * a + rp * b);
    }
    return f;
}

FieldTracker::FieldTracker(const SimContext& ctx, std::vector<TrackedFunction> fns, bool with_gamma)
    : ctx_(ctx), fns_(std::move(fns)), with_gamma_(with_gamma),
      scale_(1.0 / std::sqrt(static_cast<double>(ctx.params.N - 1))) {
    const size_t K = fns_.size();
    for (auto* v : {&Y_, &Y0_, &D_, &R_, &E_, &intD_, &intG_, &intY_}) v->assign(K, 0.0);
}

void FieldTracker::recompute(const Lattice& s) {
    const auto& eta = s.occupancy();
    const int N = ctx_.params.N;
    for (size_t k = 0; k < fns_.size(); ++k) {
        const auto& f = fns_[k];
        double y = 0, d = f.w0, r = f.g0;
        for (int x = 1; x < N; ++x) {
            y += f.h[x] * (eta[x] - ctx_.params.rho);
            d += f.w[x] * eta[x];
            r += f.gw[x] * eta[x];
        }
        Y_[k] = y * scale_;
        D_[k] = d;
        R_[k] = r;
        E_[k] = with_gamma_ ? carre_du_champ(eta, f.h, ctx_).exchange : 0.0;
    }
}

void FieldTracker::reset(const Lattice& s) {
    recompute(s);
    Y0_ = Y_;
    std::fill(intD_.begin(), intD_.end(), 0.0);
    std::fill(intG_.begin(), intG_.end(), 0.0);
    std::fill(intY_.begin(), intY_.end(), 0.0);
    records_.clear();
}

void FieldTracker::hold(double dt, const Lattice&) {
    if (dt <= 0) return;
    for (size_t k = 0; k < fns_.size(); ++k) {
        intD_[k] += D_[k] * dt;
        intY_[k] += Y_[k] * dt;
        if (with_gamma_) intG_[k] += (E_[k] + R_[k]) * dt;
    }
}

void FieldTracker::flip(int x, int now, const std::vector<uint8_t>& eta, int skip) {
    const int N = ctx_.params.N;
    const double d = now ? 1.0 : -1.0;
    const double ex = ctx_.theta_N / (N - 1);
    for (size_t k = 0; k < fns_.size(); ++k) {
        const auto& f = fns_[k];
        Y_[k] += f.h[x] * d * scale_;
        D_[k] += f.w[x] * d;
        R_[k] += f.gw[x] * d;
        if (!with_gamma_) continue;
        double s = 0;
        for (int z = 1; z < N; ++z) {
            if (z == x || z == skip) continue;
            double dh = f.h[x] - f.h[z];
            double a = ctx_.kernel->p(z - x) * dh * dh;
            s += now ? a * (1 - 2 * eta[z]) : a * (2 * eta[z] - 1);
        }
        E_[k] += ex * s;
    }
}

void FieldTracker::event(const Event& e, const Lattice& s) {
    const auto& eta = s.occupancy();
    if (e.kind == EventKind::Exchange) {
        flip(e.x, 0, eta, e.y);
        flip(e.y, 1, eta, e.x);
    } else {
        flip(e.x, eta[e.x], eta, -1);
    }
}

void FieldTracker::snapshot(double t, const Lattice& s) {
    recompute(s);
    Record r;
    r.t = t;
    r.Y = Y_;
    r.intD = intD_;
    r.intGamma = intG_;
    r.intY = intY_;
    r.M.resize(fns_.size());
    for (size_t k = 0; k < fns_.size(); ++k) r.M[k] = Y_[k] - Y0_[k] - intD_[k];
    records_.push_back(std::move(r));
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<FieldSample> run_ensemble(const EnsembleConfig& cfg, std::shared_ptr<const SimContext> ctx) {
    if (cfg.replicas < 2) throw std::invalid_argument("run_ensemble: need at least 2 replicas");
    if (cfg.require_equilibrium && !cfg.params.equilibrium())
        throw std::invalid_argument("run_ensemble: equilibrium ensemble requires alpha = beta = rho");
    if (cfg.lags.empty()) throw std::invalid_argument("run_ensemble: empty time grid");
    for (size_t i = 0; i < cfg.lags.size(); ++i)
        if (cfg.lags[i] < 0 || (i > 0 && cfg.lags[i] < cfg.lags[i - 1]))
            throw std::invalid_argument("run_ensemble: time grid must be sorted and non-negative");
    if (cfg.battery.empty()) throw std::invalid_argument("run_ensemble: no test functions");
    if (cfg.burn_in < 0) throw std::invalid_argument("run_ensemble: negative burn-in");

    std::vector<FieldSample> out(cfg.replicas);
    const double rho = cfg.params.rho;
    parallel_for(cfg.replicas, cfg.threads, [&](int r) {
        auto t0 = std::chrono::steady_clock::now();
        uint64_t seed = cfg.base_seed + static_cast<uint64_t>(r);
        Lattice L = Lattice::product(ctx, [rho](double) { return rho; }, seed);
        if (cfg.burn_in > 0) {
            L.advance(cfg.burn_in, {}, nullptr);
            L.set_clock(0);
        }
        FieldTracker tr(*ctx, cfg.battery, cfg.with_gamma);
        tr.reset(L);
        L.advance(cfg.lags.back(), cfg.lags, &tr);
        FieldSample s;
        s.replica = r;
        s.seed = seed;
        const size_t K = cfg.battery.size();
        for (auto* v : {&s.Y, &s.intD, &s.M, &s.intGamma, &s.intY}) v->assign(K, {});
        for (const auto& rec : tr.records()) {
            s.times.push_back(rec.t);
            for (size_t k = 0; k < K; ++k) {
                s.Y[k].push_back(rec.Y[k]);
                s.intD[k].push_back(rec.intD[k]);
                s.M[k].push_back(rec.M[k]);
                s.intGamma[k].push_back(rec.intGamma[k]);
                s.intY[k].push_back(rec.intY[k]);
            }
        }
        s.events = L.events_executed();
        s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out[r] = std::move(s);
    });
    return out;
}

Jackknife jackknife(const std::vector<std::vector<double>>& rows,
                    const std::function<double(const std::vector<double>&)>& stat) {
    const size_t R = rows.size();
    if (R < 2) throw std::invalid_argument("jackknife: need at least 2 rows");
    const size_t q = rows[0].size();
    std::vector<double> sum(q, 0.0);
    for (const auto& r : rows)
        for (size_t j = 0; j < q; ++j) sum[j] += r[j];
    std::vector<double> m(q);
    for (size_t j = 0; j < q; ++j) m[j] = sum[j] / R;
    const double full = stat(m);
    std::vector<double> loo(R);
    double mean = 0;
    for (size_t i = 0; i < R; ++i) {
        for (size_t j = 0; j < q; ++j) m[j] = (sum[j] - rows[i][j]) / (R - 1);
        loo[i] = stat(m);
        mean += loo[i];
    }
    mean /= R;
    double ss = 0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return {full, std::sqrt(ss * (R - 1) / R)};
}

namespace {

void mean_se(const std::vector<double>& v, double& mean, double& se) {
    const double n = static_cast<double>(v.size());
    mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (n - 1) / n);
}

}  // namespace

CovEstimate estimate_covariance(const std::vector<FieldSample>& S, int iH, int iG,
                                const std::function<double(double)>& PtHG, double chi, double exact_lag0) {
    if (S.size() < 2) throw std::invalid_argument("estimate_covariance: need at least 2 replicas");
    CovEstimate c;
    c.lags = S[0].times;
    const size_t L = c.lags.size(), R = S.size();
    std::vector<std::vector<double>> prod(L, std::vector<double>(R));
    for (size_t r = 0; r < R; ++r) {
        if (S[r].times.size() != L) throw std::runtime_error("estimate_covariance: ragged time grids");
        for (size_t i = 0; i < L; ++i) prod[i][r] = S[r].Y[iH][0] * S[r].Y[iG][i];
    }
    const double base = PtHG(0.0);
    for (size_t i = 0; i < L; ++i) {
        double m, se;
        mean_se(prod[i], m, se);
        c.emp.push_back(m);
        c.stderr_.push_back(se);
        c.n_eff.push_back(static_cast<double>(R));
        std::vector<std::vector<double>> rows(R, std::vector<double>(2));
        for (size_t r = 0; r < R; ++r) rows[r] = {prod[0][r], prod[i][r]};
        Jackknife j = jackknife(rows, [](const std::vector<double>& mm) { return mm[1] / mm[0]; });
        c.ratio.push_back(j.estimate);
        c.ratio_stderr.push_back(i == 0 ? 0.0 : j.stderr_);
        double p = PtHG(c.lags[i]);
        c.shape.push_back(p / base);
        c.theory_2chi.push_back(2 * chi * p);
        c.theory_normalized.push_back(c.emp[0] * p / base);
    }
    for (size_t i = 0; i < L; ++i) {
        double z;
        if (i == 0) z = (c.emp[0] - exact_lag0) / c.stderr_[0];
        else z = (c.ratio[i] - c.shape[i]) / c.ratio_stderr[i];
        c.z_score.push_back(z);
    }
    return c;
}

std::string CovEstimate::csv() const {
    CsvWriter w("lag,emp,stderr,theory_paper,theory_normalized,z_score");
    for (size_t i = 0; i < lags.size(); ++i)
        w.row(lags[i], emp[i], stderr_[i], theory_2chi[i], theory_normalized[i], z_score[i]);
    return w.str();
}

QvEstimate estimate_qv(const std::vector<FieldSample>& S, int iH, int it, int ih, double theory) {
    if (S.size() < 2) throw std::invalid_argument("estimate_qv: need at least 2 replicas");
    const size_t R = S.size();
    QvEstimate q;
    q.t = S[0].times.at(it);
    q.theory = theory;
    std::vector<double> M(R), M2(R), G(R), diff(R);
    bool any_gamma = false;
    for (size_t r = 0; r < R; ++r) {
        M[r] = S[r].M[iH].at(it);
        M2[r] = M[r] * M[r];
        G[r] = S[r].intGamma[iH].at(it);
        any_gamma = any_gamma || G[r] != 0.0;
        diff[r] = M2[r] - G[r];
    }
    if (!any_gamma && q.t > 0) throw std::invalid_argument("estimate_qv: quadratic variation was not recorded");
    double md;
    mean_se(M, q.mean_M, q.mean_M_stderr);
    mean_se(M2, q.var_M, q.var_M_stderr);
    mean_se(G, q.int_gamma, q.int_gamma_stderr);
    double sd;
    mean_se(diff, md, sd);
    q.z_var_vs_gamma = sd > 0 ? md / sd : 0.0;
    if (ih >= 0) {
        std::vector<std::vector<double>> rows(R);
        for (size_t r = 0; r < R; ++r) {
            double h = S[r].M[iH].at(ih);
            rows[r] = {M2[r], h * h};
        }
        Jackknife j = jackknife(rows, [](const std::vector<double>& m) { return m[0] / m[1]; });
        q.half_ratio = j.estimate;
        q.half_ratio_stderr = j.stderr_;
        q.z_half = (j.estimate - 2.0) / j.stderr_;
    }
    return q;
}

DensityEnsemble density_ensemble(std::shared_ptr<const SimContext> ctx, const std::function<double(double)>& g,
                                 double t, int nbins, int replicas, uint64_t base_seed, int threads) {
    if (replicas < 2) throw std::invalid_argument("density_ensemble: need at least 2 replicas");
    const int N = ctx->params.N;
    std::vector<DensityProfile> prof(replicas);
    parallel_for(replicas, threads, [&](int r) {
        Lattice L = Lattice::product(ctx, g, base_seed + static_cast<uint64_t>(r));
        L.advance(t, {}, nullptr);
        prof[r] = empirical_density(L.occupancy(), N, nbins);
    });
    DensityEnsemble d;
    d.mean.resize(nbins);
    d.stderr_.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        std::vector<double> v(replicas);
        for (int r = 0; r < replicas; ++r) v[r] = prof[r].bins[b];
        mean_se(v, d.mean[b], d.stderr_[b]);
    }
    d.site_mean.assign(N - 1, 0.0);
    for (const auto& p : prof)
        for (int x = 0; x < N - 1; ++x) d.site_mean[x] += p.raw[x] / replicas;
    return d;
}

std::vector<double> bin_profile(const std::function<double(double)>& f, int N, int nbins) {
    std::vector<double> sum(nbins, 0.0), cnt(nbins, 0.0);
    for (int x = 1; x < N; ++x) {
        int b = static_cast<int>(static_cast<long>(x) * nbins / N);
        sum[b] += f(static_cast<double>(x) / N);
        cnt[b] += 1;
    }
    for (int b = 0; b < nbins; ++b) sum[b] = cnt[b] > 0 ? sum[b] / cnt[b] : NAN;
    return sum;
}

}  // namespace fluctuon
