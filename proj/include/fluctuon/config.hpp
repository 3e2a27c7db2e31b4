#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluctuon/params.hpp"

namespace fluctuon {

inline const std::vector<std::string> kExperimentIds = {"hydro-check",          "cov-check",
                                                        "qv-check",             "spectral-report",
                                                        "operator-convergence", "boundary-window"};

struct ExperimentConfig {
    // [experiment]
    std::string id;
    int replicas = 50;
    std::vector<double> lags = {0.0, 0.1, 0.2, 0.4};
    std::vector<double> times = {0.1};
    double burn_in = 0.0;
    uint64_t seed = 1;
    std::vector<std::string> functions = {"basis1"};
    double g_left = 0.2;
    double g_right = 0.8;
    std::vector<double> windows = {0.2, 0.1, 0.05};
    // [model]
    ModelParams model;
    // [numerics]
    int M = 512;
    int n_max = 30;
    double dt = 0.0;  // 0 means 1/M
    int nbins = 16;
    int threads = 0;
    bool with_potential = true;
    std::vector<int> Ns = {32, 64, 128, 256};
    // [output]
    std::string out = "runs";

    bool operator==(const ExperimentConfig&) const;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct ParseOutcome {
    ExperimentConfig config;
    std::vector<std::string> errors;  // empty when valid
    std::vector<std::string> syntax;  // the subset found while reading lines
};

ParseOutcome parse_config_text(const std::string& text);
// throws ConfigError with every problem found
ExperimentConfig parse_config(const std::string& path);

std::vector<std::string> validate_config(const ExperimentConfig& c);
std::string serialize(const ExperimentConfig& c);
// FNV-1a over the serialized form, 16 hex digits
std::string config_hash(const ExperimentConfig& c);

}  // namespace fluctuon
