#pragma once

#include "dhj/analysis.hpp"
#include "dhj/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dhj {

enum class Verdict { Global, GBUNoLoss, GBULoss, Undecided };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct ExtendOptions
{
    // Empty: k_i = k0 2^i, k0 = k0_factor * max|grad u0|, k_levels levels.
    std::vector<double> k_schedule;
    double k0_factor = 2.0;
    std::size_t k_levels = 5;
    // Empty: n_snapshots evenly spaced times on [t0, t0 + horizon].
    std::vector<double> snapshot_times;
    std::size_t n_snapshots = 200;
    std::optional<double> tol_loss; // unset: 10 h^(1-beta) c_p
    double monotonicity_tol = 1e-6;
    // Step every level with the time grid of the largest k. Costs about
    // k_levels times the top level, but the discrete comparison between
    // levels then holds exactly; per-level grids leave O(dt^2) defects.
    bool shared_time_grid = true;
    bool parallel = true;
};

struct ExtendedRun
{
    std::vector<double> k_schedule;
    std::vector<RunRecord> runs;
    std::vector<Field> limit_snapshots;
    std::vector<double> gap; // sup |u_last - u_second_last| per snapshot
    std::vector<Sample> boundary_trace;
    std::optional<double> loss_time;
    double tol_loss = 0.0;
    double max_trace = 0.0;
    double max_monotonicity_defect = 0.0; // max (u_k - u_k') over k < k'
};

double default_tol_loss(const Grid& g, double p);

// Largest value at interior nodes adjacent to the boundary. The truncated
// problems pin boundary nodes to zero, so a lost boundary condition shows
// up as a jump across the first cell.
double boundary_trace_value(const Field& f);

ExtendedRun viscosity_extend(const Field& u0, double horizon, const SolverConfig& cfg,
                             const ExtendOptions& opt = {});

struct LossResult
{
    std::optional<double> loss_time;
    double max_trace = 0.0;
};

LossResult boundary_loss(const ExtendedRun& ext, double tol_loss);

struct ClassifyOptions
{
    double decay_frac = 0.5;
    // Extension runs to T_h + extension_horizon (unset: to the horizon).
    std::optional<double> extension_horizon;
    ExtendOptions extend;
};

struct Classification
{
    double lambda = 0.0;
    Verdict verdict = Verdict::Undecided;
    std::optional<double> T_h;
    std::optional<double> loss_time;
    double initial_sup = 0.0;
    double final_sup = 0.0;
    double max_trace = 0.0;
    std::string note;
};

Classification classify(const Field& u0, double horizon, const SolverConfig& cfg,
                        const ClassifyOptions& opt = {});

struct ThresholdOptions
{
    double lambda_init = 1.0;
    double rel_tol = 0.01;
    std::size_t max_probes = 60;
    ClassifyOptions classify;
};

struct ThresholdResult
{
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    std::vector<Classification> classifications; // in probe order
    bool completed = false;
    std::optional<Classification> paused_at; // Undecided probe
};

// True when, sorted by lambda, every Global verdict precedes every other.
bool classifications_monotone(std::vector<Classification> cls);

ThresholdResult threshold_bisect(const Field& phi, double horizon, const SolverConfig& cfg,
                                 const ThresholdOptions& opt = {});

// T_h(v) < T_h(u) and loss_time(v) < T_h(u) under a common gradient cap.
// A precomputed extension of u can be passed to avoid recomputing it.
MonitorReport order_check(const Field& u0, const Field& v0, double horizon, const SolverConfig& cfg,
                          const ExtendOptions& opt = {}, const ExtendedRun* u_ext = nullptr);

} // namespace dhj
