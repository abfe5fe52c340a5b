#pragma once

#include "dhj/analysis.hpp"
#include "dhj/continuation.hpp"
#include "dhj/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dhj::cli {

using Json = nlohmann::ordered_json;

// ---- CSV -------------------------------------------------------------------

// %.17g formatting, header row, comma separated.
std::string format_number(double v);
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);
// Columns x[,y],u,grad.
std::string snapshot_csv(const Field& f);
// Rebuilds nodal values from snapshot_csv output on a matching grid.
Field read_snapshot_csv(const std::string& text, std::shared_ptr<const Grid> grid, double time);

// ---- SVG -------------------------------------------------------------------

struct PlotSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotStyle
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool points = false;
    bool log_x = false;
    bool log_y = false;
};

// Self-contained SVG with axes, ticks and a legend; identical input gives
// identical bytes. Non-positive values are dropped on log axes.
std::string emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style);

// ---- manifest --------------------------------------------------------------

constexpr int kSchemaVersion = 1;

struct RunManifest
{
    int schema_version = kSchemaVersion;
    std::string experiment;
    std::string created; // timestamp; excluded from determinism checks
    Json config;         // key/value echo
    Json constants;
    std::vector<MonitorReport> monitors;
    std::map<std::string, ProfileFit> fits;
    std::vector<std::string> files;
    std::map<std::string, double> timings; // wall-clock seconds
    Json results;
};

Json to_json(const MonitorReport& r);
MonitorReport monitor_from_json(const Json& j);
Json to_json(const ProfileFit& f);
ProfileFit fit_from_json(const Json& j);
Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);
Json to_json(const Constants& c);
Json to_json(const Classification& c);
Json to_json(const ThresholdResult& r);

// Non-finite numbers become null and read back as +infinity.
Json number(double v);
double number_from(const Json& j);

void write_text(const std::filesystem::path& p, const std::string& text);
std::string read_text(const std::filesystem::path& p);

// <out>/<name>-<UTC timestamp>[-n]; never reuses an existing directory.
std::filesystem::path make_run_dir(const std::filesystem::path& out, const std::string& name,
                                   std::string* timestamp = nullptr);

} // namespace dhj::cli
