#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fluctuon/kmc.hpp"
#include "fluctuon/spectral.hpp"
#include "fluctuon/test_function.hpp"

namespace fluctuon {

// H sampled at x/N, x = 0..N (entries 0 and N unused)
std::vector<double> lattice_values(const TestFunction& H, int N);

// (N-1)^-1/2 sum_x h[x] (eta(x) - rho)
double fluct_field(const std::vector<uint8_t>& eta, const std::vector<double>& h, double rho);
double fluct_field(const std::vector<uint8_t>& eta, const TestFunction& H, double rho);

struct GammaParts {
    double exchange = 0;   // Theta/(N-1) sum_{x<y} p (dH)^2 (eta(x)-eta(y))^2
    double reservoir = 0;  // Theta kappa N^-theta/(N-1) sum_x (r- c_x(alpha) + r+ c_x(beta)) H^2
    double literal = 0;    // ordered double sum over N, reservoir with rho + (1-2rho) eta over N^(1+theta)
    double total() const { return exchange + reservoir; }
};

GammaParts carre_du_champ(const std::vector<uint8_t>& eta, const std::vector<double>& h, const SimContext& ctx);

// Theta(N) L_N Y(H), operator term plus reservoir term
double drift(const std::vector<uint8_t>& eta, const std::vector<double>& h, const SimContext& ctx);

// Y(iota_eps) with iota^0 = eps^-1 1_(0,eps], iota^1 = eps^-1 1_[1-eps,1)
double boundary_window_field(const std::vector<uint8_t>& eta, int side, double eps, double rho, int N);
std::vector<double> window_values(int side, double eps, int N);

// per-function precomputation for incremental tracking
struct TrackedFunction {
    std::string name;
    std::vector<double> h;       // H(x/N)
    std::vector<double> w;       // drift = sum_x w[x] eta(x) + w0
    double w0 = 0;
    std::vector<double> gw;      // reservoir part of Gamma = sum_x gw[x] eta(x) + g0
    double g0 = 0;
};

TrackedFunction track(const std::string& name, const std::vector<double>& h, const SimContext& ctx);

class FieldTracker : public Observer {
public:
    FieldTracker(const SimContext& ctx, std::vector<TrackedFunction> fns, bool with_gamma);
    void reset(const Lattice& s);
    void hold(double dt, const Lattice& s) override;
    void event(const Event& e, const Lattice& s) override;
    void snapshot(double t, const Lattice& s) override;

    struct Record {
        double t;
        std::vector<double> Y, intD, M, intGamma, intY;
    };
    const std::vector<Record>& records() const { return records_; }
    double Y(int k) const { return Y_[k]; }
    double D(int k) const { return D_[k]; }

private:
    void recompute(const Lattice& s);
    void flip(int x, int now, const std::vector<uint8_t>& eta, int skip);
    const SimContext& ctx_;
    std::vector<TrackedFunction> fns_;
    bool with_gamma_;
    double scale_;
    std::vector<double> Y_, Y0_, D_, R_, E_, intD_, intG_, intY_;
    std::vector<Record> records_;
};

struct EnsembleConfig {
    ModelParams params;
    std::vector<TrackedFunction> battery;  // built against the same params
    std::vector<double> lags;              // sorted, after burn-in
    double burn_in = 0;
    int replicas = 2;
    uint64_t base_seed = 1;
    bool with_gamma = false;
    int threads = 0;  // 0: hardware concurrency
    bool require_equilibrium = true;
};

struct FieldSample {
    int replica;
    uint64_t seed;
    std::vector<double> times;
    // [function][time]
    std::vector<std::vector<double>> Y, intD, M, intGamma, intY;
    double wall_seconds = 0;
    uint64_t events = 0;
};

std::vector<FieldSample> run_ensemble(const EnsembleConfig& cfg, std::shared_ptr<const SimContext> ctx);

// runs f(r) for r = 0..n-1 on a pool of threads; results land by index
void parallel_for(int n, int threads, const std::function<void(int)>& f);

struct Jackknife {
    double estimate;
    double stderr_;
};

// leave-one-out over rows of a per-replica table
Jackknife jackknife(const std::vector<std::vector<double>>& rows,
                    const std::function<double(const std::vector<double>& means)>& stat);

struct CovEstimate {
    std::vector<double> lags;
    std::vector<double> emp;      // mean Y_0(H) Y_t(G)
    std::vector<double> stderr_;
    std::vector<double> n_eff;
    std::vector<double> ratio;    // emp(t)/emp(0)
    std::vector<double> ratio_stderr;
    std::vector<double> shape;    // <P_t H, G>/<H, G>
    std::vector<double> theory_2chi;        // 2 chi <P_t H, G>
    std::vector<double> theory_normalized;  // emp(0) <P_t H, G>/<H, G>
    std::vector<double> z_score;            // (ratio - shape)/ratio_stderr, lag 0: (emp - exact)/stderr
    std::string csv() const;  // lag,emp,stderr,theory_paper,theory_normalized,z_score
};

// shape(t) = <P_t H, G> on the semigroup grid; exact_lag0 is the finite-N product-measure value
CovEstimate estimate_covariance(const std::vector<FieldSample>& samples, int iH, int iG,
                                const std::function<double(double)>& PtHG, double chi, double exact_lag0);

struct QvEstimate {
    double t = 0;
    double mean_M = 0, mean_M_stderr = 0;
    double var_M = 0, var_M_stderr = 0;
    double int_gamma = 0, int_gamma_stderr = 0;
    double z_var_vs_gamma = 0;  // paired difference of M^2 and int Gamma
    double half_ratio = 0, half_ratio_stderr = 0, z_half = 0;  // Var(M_t)/Var(M_{t/2}) against 2
    double theory = 0;          // t ||H||_theta^2 when supplied
};

// it indexes the time grid; the half time must also be on the grid (or ih = -1)
QvEstimate estimate_qv(const std::vector<FieldSample>& samples, int iH, int it, int ih, double theory = 0);

struct DensityEnsemble {
    std::vector<double> mean;    // per bin
    std::vector<double> stderr_;
    std::vector<double> site_mean;  // x = 1..N-1 at x-1
};

DensityEnsemble density_ensemble(std::shared_ptr<const SimContext> ctx, const std::function<double(double)>& g,
                                 double t, int nbins, int replicas, uint64_t base_seed, int threads = 0);

// bin averages of a profile over the lattice sites of each bin
std::vector<double> bin_profile(const std::function<double(double)>& f, int N, int nbins);

}  // namespace fluctuon
