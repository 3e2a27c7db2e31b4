#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fluctuon/config.hpp"
#include "fluctuon/experiments.hpp"

using namespace fluctuon;

namespace {

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<int> replicas;
    std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "base seed (replica r uses seed + r)");
    cmd->add_option("--replicas", o.replicas, "ensemble size");
    cmd->add_option("--out", o.out, "output root directory");
}

// parse, apply overrides, revalidate; prints every error and returns nullopt on failure
std::optional<ExperimentConfig> load(const std::string& path, const Overrides& o) {
    std::vector<std::string> errs;
    ExperimentConfig c;
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        errs.push_back("cannot open config file");
    } else {
        std::stringstream ss;
        ss << f.rdbuf();
        auto r = parse_config_text(ss.str());
        c = r.config;
        if (o.seed) c.seed = *o.seed;
        if (o.replicas) c.replicas = *o.replicas;
        if (o.out) c.out = *o.out;
        errs = r.syntax;
        for (auto& e : validate_config(c))
            if (e.rfind("[experiment] id", 0) != 0 || !c.id.empty()) errs.push_back(e);
    }
    if (errs.empty()) return c;
    std::cerr << path << ": " << errs.size() << " error(s)\n";
    for (const auto& m : errs) std::cerr << "  " << m << "\n";
    return std::nullopt;
}

std::string now_iso() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluctuon: long-range exclusion with reservoirs, hydrodynamics and fluctuations"};
    app.require_subcommand(1);

    std::string config_path, run_dir;
    Overrides run_o, val_o;
    auto* run = app.add_subcommand("run", "run an experiment and write a run directory");
    run->add_option("config", config_path, "experiment config")->required();
    add_overrides(run, run_o);
    auto* val = app.add_subcommand("validate", "parse and validate a config");
    val->add_option("config", config_path, "experiment config")->required();
    add_overrides(val, val_o);
    auto* rep = app.add_subcommand("report", "summarize a run directory");
    rep->add_option("run-dir", run_dir, "directory written by run")->required();

    CLI11_PARSE(app, argc, argv);

    if (*val) {
        auto c = load(config_path, val_o);
        if (!c) return 2;
        std::cout << "ok: " << c->id << " (config hash " << config_hash(*c) << ")\n";
        return 0;
    }
    if (*rep) return report_run(run_dir, std::cout);

    auto c = load(config_path, run_o);
    if (!c) return 2;
    try {
        const std::string started = now_iso();
        auto t0 = std::chrono::steady_clock::now();
        ExperimentResult res = run_experiment(*c);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string dir = write_run(*c, res, wall, started);
        for (const auto& ch : res.checks) std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << "\n";
        std::cout << dir << "\n";
        return res.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << c->id << ": " << e.what() << "\n";
        return 3;
    }
}
