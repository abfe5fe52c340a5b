#pragma once

#include "dhj/cli/config.hpp"
#include "dhj/cli/output.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dhj::cli {

const std::vector<std::string>& experiment_names();

struct ExperimentResult
{
    RunManifest manifest;
    std::filesystem::path dir;
    bool passed = true; // every monitor passed
};

// Runs the named pipeline and writes <out>/<cfg.name>-<timestamp>/ with
// manifest.json plus CSV and SVG artifacts. Errors from a module are
// rethrown as Error with the failing stage named.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg,
                                const std::filesystem::path& out);

// Same pipeline into an existing directory.
ExperimentResult run_experiment_in(const std::string& name, const ExperimentConfig& cfg,
                                   const std::filesystem::path& dir);

// Manifest JSON without the volatile fields (created, timings).
Json stable_view(const RunManifest& m);

// Manufactured steady state for the `elliptic` experiment and its forcing
// f = -Lap u* - |grad u*|^p.
double mms_solution(const DomainSpec& d, double amplitude, const Point& x);
double mms_forcing(const DomainSpec& d, double amplitude, double p, const Point& x);

} // namespace dhj::cli
