#include "fluctuon/experiments.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "fluctuon/csv.hpp"
#include "fluctuon/fluct.hpp"
#include "fluctuon/hydro.hpp"
#include "fluctuon/kn_operator.hpp"
#include "fluctuon/spectral.hpp"
#include "fluctuon/svg.hpp"
#include "json.hpp"

namespace fluctuon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kHydroL1 = 0.05;
constexpr double kZ = 3.0;
constexpr double kMaxPrinciple = 1e-9;
constexpr double kLapMatch = 1e-8;
constexpr double kOrtho = 1e-8;
constexpr const char* kVersion = "0.1.0";

Check check_le(std::string name, double v, double thr) { return {std::move(name), v, thr, "<=", v <= thr}; }
Check check_lt(std::string name, double v, double thr) { return {std::move(name), v, thr, "<", v < thr}; }

ExperimentResult hydro_check(const ExperimentConfig& c) {
    ExperimentResult res;
    auto k = std::make_shared<const JumpKernel>(build_kernel(c.model.gamma));
    auto ctx = SimContext::make(c.model, k);
    const RegimeSpec& rg = ctx->regime;
    const int N = c.model.N;
    Profile g = step_profile(c.g_left, c.g_right);
    const double dt = c.dt > 0 ? c.dt : 1.0 / c.M;
    PdeSolution pde = solve_pde(rg, c.model, *k, g, c.times, c.M, dt);
    res.files.push_back({"hydro.csv", pde.csv()});
    res.checks.push_back(check_le("max_principle_excess", pde.max_principle_excess, kMaxPrinciple));

    CsvWriter dens("t,bin,u_mid,emp,stderr,pde");
    std::vector<Series> plot;
    for (size_t i = 0; i < c.times.size(); ++i) {
        const double t = c.times[i];
        DensityEnsemble d = density_ensemble(ctx, g, t, c.nbins, c.replicas, c.seed, c.threads);
        auto ref = bin_profile([&](double u) { return pde.at(static_cast<int>(i), u); }, N, c.nbins);
        double l1 = 0;
        Series se{"mc t=" + num(t), {}, {}, {}, true}, sp{"pde t=" + num(t), {}, {}, {}, false};
        for (int b = 0; b < c.nbins; ++b) {
            double um = (b + 0.5) / c.nbins;
            dens.row(t, b, um, d.mean[b], d.stderr_[b], ref[b]);
            l1 += std::abs(d.mean[b] - ref[b]) / c.nbins;
            se.x.push_back(um);
            se.y.push_back(d.mean[b]);
            se.err.push_back(d.stderr_[b]);
            sp.x.push_back(um);
            sp.y.push_back(ref[b]);
        }
        plot.push_back(se);
        plot.push_back(sp);
        res.checks.push_back(check_lt("binned_L1(t=" + num(t) + ")", l1, kHydroL1));
    }
    for (int r = 0; r < c.replicas; ++r) res.seeds.push_back(c.seed + r);
    res.files.push_back({"density.csv", dens.str()});
    res.files.push_back({"plots/profiles.svg",
                         svg_plot({"density profile, " + to_string(rg.id), "u", "rho"}, plot)});
    res.tolerances = {{"binned_L1", kHydroL1}, {"max_principle", kMaxPrinciple}, {"dt", dt}};
    return res;
}

std::vector<TrackedFunction> battery_of(const ExperimentConfig& c, const SimContext& ctx,
                                        std::vector<TestFunction>* fns) {
    std::vector<TrackedFunction> out;
    for (const auto& name : c.functions) {
        TestFunction H = named_function(name, c.model, *ctx.kernel);
        out.push_back(track(name, lattice_values(H, c.model.N), ctx));
        if (fns) fns->push_back(H);
    }
    return out;
}

ExperimentResult cov_check(const ExperimentConfig& c) {
    ExperimentResult res;
    auto k = std::make_shared<const JumpKernel>(build_kernel(c.model.gamma));
    auto ctx = SimContext::make(c.model, k);
    std::vector<TestFunction> fns;
    EnsembleConfig ec;
    ec.params = c.model;
    ec.battery = battery_of(c, *ctx, &fns);
    ec.lags = c.lags;
    ec.burn_in = c.burn_in;
    ec.replicas = c.replicas;
    ec.base_seed = c.seed;
    ec.threads = c.threads;
    auto samples = run_ensemble(ec, ctx);
    for (const auto& s : samples) res.seeds.push_back(s.seed);
    Semigroup S = Semigroup::make(c.model, k, c.M, c.n_max);
    const double chi = c.model.chi();
    std::vector<Series> plot;
    for (size_t i = 0; i < fns.size(); ++i) {
        auto Hs = S.sample(fns[i]);
        auto PtHG = [&](double t) { return S.dot(S.apply(Hs, t), Hs); };
        double exact0 = 0;
        for (double v : ec.battery[i].h) exact0 += v * v;
        exact0 *= chi / (c.model.N - 1);
        CovEstimate e = estimate_covariance(samples, static_cast<int>(i), static_cast<int>(i), PtHG, chi, exact0);
        res.files.push_back({"estimates_" + c.functions[i] + ".csv", e.csv()});
        for (size_t j = 0; j < e.lags.size(); ++j)
            res.checks.push_back(check_le("|z| " + c.functions[i] + " lag=" + num(e.lags[j]),
                                          std::abs(e.z_score[j]), kZ));
        plot.push_back({"emp " + c.functions[i], e.lags, e.emp, e.stderr_, true});
        plot.push_back({"theory " + c.functions[i], e.lags, e.theory_normalized, {}, false});
    }
    res.files.push_back({"plots/covariance.svg",
                         svg_plot({"lag covariance, " + to_string(S.kind()), "lag", "E Y0 Yt"}, plot)});
    res.tolerances = {{"z", kZ}};
    return res;
}

ExperimentResult qv_check(const ExperimentConfig& c) {
    ExperimentResult res;
    auto k = std::make_shared<const JumpKernel>(build_kernel(c.model.gamma));
    auto ctx = SimContext::make(c.model, k);
    std::vector<TestFunction> fns;
    EnsembleConfig ec;
    ec.params = c.model;
    ec.battery = battery_of(c, *ctx, &fns);
    ec.lags = c.lags;
    ec.burn_in = c.burn_in;
    ec.replicas = c.replicas;
    ec.base_seed = c.seed;
    ec.threads = c.threads;
    ec.with_gamma = true;
    auto samples = run_ensemble(ec, ctx);
    for (const auto& s : samples) res.seeds.push_back(s.seed);
    const int it = static_cast<int>(c.lags.size()) - 1;
    int ih = -1;
    for (int j = 0; j < it; ++j)
        if (std::abs(c.lags[j] - c.lags[it] / 2) < 1e-12) ih = j;
    CsvWriter w("function,t,mean_M,mean_M_stderr,var_M,var_M_stderr,int_gamma,int_gamma_stderr,z_var_vs_gamma,"
                "half_ratio,half_ratio_stderr,theory");
    std::vector<Series> plot;
    for (size_t i = 0; i < fns.size(); ++i) {
        double theory = NAN;
        try {
            const double nt = norm_theta(fns[i], c.model, *k);
            theory = c.lags[it] * nt;
        } catch (const std::exception&) {
        }
        Series sv{"Var M " + c.functions[i], {}, {}, {}, true}, sg{"E int Gamma " + c.functions[i], {}, {}, {}, false};
        for (int j = 1; j <= it; ++j) {
            int half = -1;
            for (int m = 0; m < j; ++m)
                if (std::abs(c.lags[m] - c.lags[j] / 2) < 1e-12) half = m;
            QvEstimate q = estimate_qv(samples, static_cast<int>(i), j, half, j == it ? theory : NAN);
            w.row(c.functions[i], q.t, q.mean_M, q.mean_M_stderr, q.var_M, q.var_M_stderr, q.int_gamma,
                  q.int_gamma_stderr, q.z_var_vs_gamma, q.half_ratio, q.half_ratio_stderr, q.theory);
            sv.x.push_back(q.t);
            sv.y.push_back(q.var_M);
            sv.err.push_back(q.var_M_stderr);
            sg.x.push_back(q.t);
            sg.y.push_back(q.int_gamma);
            if (j == it) {
                res.checks.push_back(check_le("|z| Var(M) vs E int Gamma " + c.functions[i],
                                              std::abs(q.z_var_vs_gamma), kZ));
                res.checks.push_back(
                    check_le("|z| mean M " + c.functions[i], std::abs(q.mean_M / q.mean_M_stderr), kZ));
                if (ih >= 0)
                    res.checks.push_back(check_le("|z| Var(M_t)/Var(M_t/2) - 2 " + c.functions[i],
                                                  std::abs(q.z_half), kZ));
            }
        }
        plot.push_back(sv);
        plot.push_back(sg);
    }
    res.files.push_back({"qv.csv", w.str()});
    res.files.push_back({"plots/qv.svg", svg_plot({"martingale quadratic variation", "t", "variance"}, plot)});
    res.tolerances = {{"z", kZ}};
    return res;
}

ExperimentResult spectral_report(const ExperimentConfig& c) {
    ExperimentResult res;
    JumpKernel k = build_kernel(c.model.gamma);
    SymTridiag op = discretize_A(c.model, k, c.M, true, c.with_potential);
    SpectralBasis B = eigensolve(op, c.n_max);
    CsvWriter w("n,lambda_n,lap_lower_bound,u_n,u_n_lambda_pow,decay_slope");
    Series sl{"lambda_n", {}, {}, {}, true}, sb{"(s2/2)(pi n)^2 (1-slack)", {}, {}, {}, false};
    double worst = INFINITY, worst_lap = 0;
    const double half = 0.5 * k.sigma2;
    for (int n = 1; n <= c.n_max; ++n) {
        double lam = B.eigenvalues[n - 1];
        double a = std::numbers::pi * n;
        double bound = half * a * a * (1 - laplacian_slack(n, c.M));
        double un = NAN, prod = NAN, slope = NAN;
        if (c.with_potential) {
            try {
                TurningPoint tp = turning_point(B, n, c.model, k);
                un = tp.u;
                prod = tp.product;
                slope = boundary_decay_report(B, n, un / 2).slope;
            } catch (const std::exception&) {
            }
        } else {
            worst_lap = std::max(worst_lap, std::abs(lam - bound) / bound);
        }
        worst = std::min(worst, (lam - bound) / bound);
        w.row(n, lam, bound, un, prod, slope);
        sl.x.push_back(n);
        sl.y.push_back(lam);
        sb.x.push_back(n);
        sb.y.push_back(bound);
    }
    double ortho = 0;
    const double h = 1.0 / c.M;
    for (int a = 0; a < c.n_max; ++a)
        for (int b = 0; b < c.n_max; ++b) {
            double s = 0;
            for (int j = 1; j < c.M; ++j) s += B.vectors[a][j] * B.vectors[b][j] * h;
            ortho = std::max(ortho, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    res.checks.push_back({"min (lambda_n - bound)/bound", worst, -1e-12, ">=", worst >= -1e-12});
    res.checks.push_back(check_lt("orthonormality defect", ortho, kOrtho));
    if (!c.with_potential) res.checks.push_back(check_lt("discrete Laplacian match", worst_lap, kLapMatch));
    res.files.push_back({"spectral.csv", w.str()});
    res.files.push_back({"plots/eigenvalues.svg", svg_plot({"eigenvalues vs Laplacian bound", "n", "lambda", true},
                                                           {sl, sb})});
    res.tolerances = {{"orthonormality", kOrtho}, {"laplacian_match", kLapMatch}};
    return res;
}

ExperimentResult operator_convergence(const ExperimentConfig& c) {
    ExperimentResult res;
    JumpKernel k = build_kernel(c.model.gamma);
    TestFunction H = sin2_zero_extended();
    const double thr = 0.1 * 2 * std::numbers::pi * std::numbers::pi * k.sigma2 / 2;
    CsvWriter w("N,sup_error,interior_error,argmax_u,threshold");
    Series s1{"sup error", {}, {}, {}, true}, s2{"interior error", {}, {}, {}, true};
    std::vector<KnErrorRow> rows;
    for (int n : c.Ns) {
        KnErrorRow r = kn_error(k, H, n);
        rows.push_back(r);
        w.row(n, r.sup_error, r.interior_error, static_cast<double>(r.argmax) / n, thr);
        s1.x.push_back(n);
        s1.y.push_back(r.sup_error);
        s2.x.push_back(n);
        s2.y.push_back(r.interior_error);
        res.checks.push_back(check_lt("sup error N=" + std::to_string(n), r.sup_error, thr));
    }
    for (size_t i = 1; i < rows.size(); ++i) {
        bool dec = rows[i].sup_error < rows[i - 1].sup_error;
        res.checks.push_back({"sup error decreasing N=" + std::to_string(rows[i].N), rows[i].sup_error,
                              rows[i - 1].sup_error, "<", dec});
    }
    res.files.push_back({"operator_convergence.csv", w.str()});
    CsvWriter t("N,sup_minus,sup_plus");
    for (const auto& r : tail_convergence_report(k, c.Ns, 0.1, 0.9)) t.row(r.N, r.sup_minus, r.sup_plus);
    res.files.push_back({"tail_convergence.csv", t.str()});
    res.files.push_back({"plots/operator_convergence.svg",
                         svg_plot({"K_N error for sin^2(pi u)", "N", "sup error", true}, {s1, s2})});
    res.tolerances = {{"kn_threshold", thr}};
    return res;
}

ExperimentResult boundary_window(const ExperimentConfig& c) {
    ExperimentResult res;
    auto k = std::make_shared<const JumpKernel>(build_kernel(c.model.gamma));
    auto ctx = SimContext::make(c.model, k);
    EnsembleConfig ec;
    ec.params = c.model;
    for (double e : c.windows) ec.battery.push_back(track("iota0(" + num(e) + ")", window_values(0, e, c.model.N), *ctx));
    const double t = c.times.back();
    ec.lags = {0.0, t};
    ec.burn_in = c.burn_in;
    ec.replicas = c.replicas;
    ec.base_seed = c.seed;
    ec.threads = c.threads;
    auto samples = run_ensemble(ec, ctx);
    for (const auto& s : samples) res.seeds.push_back(s.seed);
    CsvWriter w("eps,t,mean_sq,stderr");
    Series s{"E (int Y(iota))^2", {}, {}, {}, true};
    std::vector<std::pair<double, double>> vals;
    for (size_t i = 0; i < c.windows.size(); ++i) {
        double m = 0, ss = 0;
        const double R = static_cast<double>(samples.size());
        for (const auto& smp : samples) m += smp.intY[i].back() * smp.intY[i].back() / R;
        for (const auto& smp : samples) {
            double q = smp.intY[i].back() * smp.intY[i].back() - m;
            ss += q * q;
        }
        double se = std::sqrt(ss / (R - 1) / R);
        w.row(c.windows[i], t, m, se);
        s.x.push_back(c.windows[i]);
        s.y.push_back(m);
        s.err.push_back(se);
        vals.push_back({c.windows[i], m});
    }
    std::sort(vals.begin(), vals.end());
    for (size_t i = 1; i < vals.size(); ++i)
        res.checks.push_back({"E(int Y)^2 at eps=" + num(vals[i - 1].first) + " below eps=" + num(vals[i].first),
                              vals[i - 1].second, vals[i].second, "<", vals[i - 1].second < vals[i].second});
    res.files.push_back({"boundary_window.csv", w.str()});
    res.files.push_back({"plots/boundary_window.svg",
                         svg_plot({"boundary window time integral", "eps", "second moment"}, {s})});
    return res;
}

std::string timestamp_compact(const std::string& iso) {
    std::string s;
    for (char ch : iso)
        if (std::isdigit(static_cast<unsigned char>(ch))) s += ch;
    return s.substr(0, 8) + "T" + s.substr(8, 6);
}

}  // namespace

bool ExperimentResult::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

TestFunction sin2_zero_extended() {
    const double w = 2 * std::numbers::pi;
    return TestFunction(
        "sin^2(pi*u)",
        [w](double u, int k) {
            if (k == 0) return 0.5 - 0.5 * std::cos(w * u);
            return -0.5 * std::pow(w, k) * std::cos(w * u + k * std::numbers::pi / 2);
        },
        64, Space::Plumbing, Extension::ZeroOutside);
}

TestFunction named_function(const std::string& name, const ModelParams& p, const JumpKernel& k) {
    std::smatch m;
    static const std::regex re("(basis|sin)([1-9][0-9]*)");
    if (std::regex_match(name, m, re)) {
        int n = std::stoi(m[2]);
        if (m[1] == "sin") return sine_mode(n);
        RegimeSpec rg = regime_of(p, k);
        return make_basis(rg.test_space, n, robin_coupling(p, k));
    }
    if (name == "one") return constant_function(1.0);
    if (name == "bump") return make_special(Special::BumpA);
    throw std::invalid_argument("unknown test function '" + name + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    auto errs = validate_config(cfg);
    if (!errs.empty()) throw ConfigError(errs);
    if (cfg.id == "hydro-check") return hydro_check(cfg);
    if (cfg.id == "cov-check") return cov_check(cfg);
    if (cfg.id == "qv-check") return qv_check(cfg);
    if (cfg.id == "spectral-report") return spectral_report(cfg);
    if (cfg.id == "operator-convergence") return operator_convergence(cfg);
    if (cfg.id == "boundary-window") return boundary_window(cfg);
    throw std::invalid_argument("unknown experiment " + cfg.id);
}

std::string write_run(const ExperimentConfig& cfg, const ExperimentResult& res, double wall,
                      const std::string& started_at) {
    const std::string hash = config_hash(cfg);
    fs::path root(cfg.out);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + root.string() + ": " + ec.message());
    const std::string stem = cfg.id + "-" + timestamp_compact(started_at) + "-" + hash.substr(0, 8);
    fs::path dir;
    for (int k = 1;; ++k) {
        dir = root / (k == 1 ? stem : stem + "-" + std::to_string(k));
        if (fs::create_directory(dir, ec)) break;
        if (ec) throw std::runtime_error("cannot create run directory " + dir.string() + ": " + ec.message());
    }
    fs::create_directory(dir / "plots");

    json files = json::array();
    for (const auto& a : res.files) {
        std::ofstream f(dir / a.path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / a.path).string());
        f << a.content;
        files.push_back(a.path);
    }

    auto parsed = parse_config_text(serialize(cfg)).config;
    json echo;
    echo["model"] = {{"N", parsed.model.N},         {"gamma", parsed.model.gamma}, {"theta", parsed.model.theta},
                     {"kappa", parsed.model.kappa}, {"alpha", parsed.model.alpha}, {"beta", parsed.model.beta},
                     {"rho", parsed.model.rho}};
    echo["experiment"] = {{"id", cfg.id},           {"replicas", cfg.replicas}, {"lags", cfg.lags},
                          {"times", cfg.times},     {"burn_in", cfg.burn_in},   {"seed", cfg.seed},
                          {"functions", cfg.functions}, {"g_left", cfg.g_left}, {"g_right", cfg.g_right},
                          {"windows", cfg.windows}};
    echo["numerics"] = {{"M", cfg.M},         {"n_max", cfg.n_max},     {"dt", cfg.dt},
                        {"nbins", cfg.nbins}, {"threads", cfg.threads}, {"with_potential", cfg.with_potential},
                        {"Ns", cfg.Ns}};
    echo["output"] = {{"out", cfg.out}};

    json checks = json::array();
    for (const auto& c : res.checks)
        checks.push_back({{"name", c.name},
                          {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                          {"threshold", std::isfinite(c.threshold) ? json(c.threshold) : json(nullptr)},
                          {"relation", c.relation},
                          {"pass", c.pass}});
    json tol = json::object();
    for (const auto& [k, v] : res.tolerances) tol[k] = v;
    char eigen[32];
    std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
    json m;
    m["experiment"] = cfg.id;
    m["config"] = echo;
    m["config_text"] = serialize(cfg);
    m["config_hash"] = hash;
    m["seed"] = cfg.seed;
    m["replica_seeds"] = res.seeds;
    m["versions"] = {{"fluctuon", kVersion},
                     {"compiler", __VERSION__},
                     {"eigen", eigen},
                     {"boost", BOOST_LIB_VERSION},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["started_at"] = started_at;
    m["wall_clock_seconds"] = wall;
    m["tolerances"] = tol;
    m["checks"] = checks;
    m["status"] = res.pass() ? "pass" : "fail";
    m["files"] = files;
    std::ofstream f(dir / "manifest.json");
    f << m.dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write manifest.json in " + dir.string());
    return dir.string();
}

int report_run(const std::string& run_dir, std::ostream& os) {
    std::ifstream f(fs::path(run_dir) / "manifest.json");
    if (!f) {
        os << "no manifest.json in " << run_dir << "\n";
        return 2;
    }
    json m;
    try {
        m = json::parse(f);
    } catch (const std::exception& e) {
        os << "unreadable manifest.json: " << e.what() << "\n";
        return 2;
    }
    os << "experiment  " << m.value("experiment", "?") << "\n";
    os << "config hash " << m.value("config_hash", "?") << "\n";
    os << "seed        " << m.value("seed", 0ull) << " (" << m["replica_seeds"].size() << " replica seeds)\n";
    os << "started     " << m.value("started_at", "?") << ", wall clock " << m.value("wall_clock_seconds", 0.0)
       << " s\n";
    int failed = 0;
    for (const auto& c : m["checks"]) {
        bool pass = c.value("pass", false);
        failed += !pass;
        os << (pass ? "  PASS " : "  FAIL ") << c.value("name", "") << ": " << c["value"].dump() << " "
           << c.value("relation", "") << " " << c["threshold"].dump() << "\n";
    }
    os << "files:";
    for (const auto& p : m["files"]) os << " " << p.get<std::string>();
    os << "\nstatus      " << m.value("status", "?") << " (" << failed << " failed of " << m["checks"].size()
       << ")\n";
    return failed == 0 && m.value("status", "") == "pass" ? 0 : 1;
}

}  // namespace fluctuon
