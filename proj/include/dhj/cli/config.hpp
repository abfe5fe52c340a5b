#pragma once

#include "dhj/barriers.hpp"
#include "dhj/continuation.hpp"
#include "dhj/solver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dhj::cli {

enum class InitialKind { Zero, Sine, FaceBump };

struct InitialSpec
{
    InitialKind kind = InitialKind::Sine;
    double amplitude = 1.0;
    double width = 0.25; // face_bump only
};

struct MonitorSettings
{
    double eps = 0.25;
    std::optional<double> budget; // unset: 5 max|grad u0|
    double activity_threshold = 0.5;
    double dominance_tol = 0.25;
};

struct BarrierSettings
{
    std::vector<double> p_values{2.5, 3.0, 4.0};
    double k_fraction = 0.5; // k = k_fraction * d_p
    double rho = 0.1;
    double tau = 1.0;
    double L = 0.0;
    double c1 = 1.0;
    std::vector<double> c_values; // empty: 10^-1 ... 10^-12
    std::size_t nx = 200;
    std::size_t nt = 200;
};

struct SweepSettings
{
    std::string experiment = "solve";
    std::string parameter;
    std::vector<std::string> values;
    std::size_t workers = 0; // 0: hardware concurrency
};

struct ExperimentConfig
{
    std::string name = "run";
    DomainSpec domain = DomainSpec::interval(1.0);
    double h = 0.005;
    SolverConfig solver;
    InitialSpec initial;

    std::string elliptic_forcing = "zero"; // zero | mms
    double elliptic_amplitude = 0.1;

    double horizon = 1.0;
    ExtendOptions extend;
    ClassifyOptions classify;

    ThresholdOptions threshold;
    double threshold_horizon = 2.0;

    MonitorSettings monitor;
    std::string profile_run_dir;
    BarrierSettings barrier;
    SweepSettings sweep;

    // The key/value pairs exactly as given (after trimming).
    std::map<std::string, std::string> given;
};

// One documented key of the schema.
struct KeyInfo
{
    std::string key;
    std::string type;
    std::string default_value;
    std::string description;
};

const std::vector<KeyInfo>& config_schema();

// Parses `section.key = value` lines; '#' starts a comment. Unknown keys,
// duplicates and malformed values raise ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const std::map<std::string, std::string>& kv);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const std::map<std::string, std::string>& kv);

Field initial_field(const ExperimentConfig& cfg, std::shared_ptr<const Grid> grid);

} // namespace dhj::cli
