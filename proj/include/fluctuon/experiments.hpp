#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fluctuon/config.hpp"
#include "fluctuon/kernel.hpp"
#include "fluctuon/test_function.hpp"

namespace fluctuon {

struct Check {
    std::string name;
    double value;
    double threshold;
    std::string relation;  // "<", "<=", ">=", "decreasing", ...
    bool pass;
};

struct Artifact {
    std::string path;  // relative to the run directory
    std::string content;
};

struct ExperimentResult {
    std::vector<Check> checks;
    std::vector<Artifact> files;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<uint64_t> seeds;
    bool pass() const;
};

// sin^2(pi u) with the zero extension, the probe of the K_N convergence check
TestFunction sin2_zero_extended();

// basisN, sinN, one, bump
TestFunction named_function(const std::string& name, const ModelParams& params, const JumpKernel& kernel);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// creates a fresh run directory and writes every artifact plus manifest.json; returns the path
std::string write_run(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_seconds,
                      const std::string& started_at);

// prints a summary of a finished run; 0 when every recorded check passed
int report_run(const std::string& run_dir, std::ostream& os);

}  // namespace fluctuon
