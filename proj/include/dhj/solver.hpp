#pragma once

#include "dhj/geometry.hpp"
#include "dhj/profiles.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dhj {

// Nodal values of a scalar at one instant.
struct Field
{
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    double time = 0.0;

    static Field zeros(std::shared_ptr<const Grid> g, double t = 0.0);
    static Field sample(std::shared_ptr<const Grid> g, const std::function<double(const Point&)>& fn,
                        double t = 0.0);

    bool valid() const;
    double max_abs() const;
};

using Gradient = std::vector<Point>;

struct Hessian
{
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

// Central differences inside, 3-point one-sided differences on the boundary,
// u_r(0) = 0 on the disk axis. Rejects grids with fewer than 4 nodes per axis.
Gradient gradient(const Field& f);

// Second derivatives: 3-point centred inside, 4-point one-sided at edges,
// mixed derivative by differencing the gradient. Radial fields carry u_rr
// in xx.
std::vector<Hessian> hessian(const Field& f);

// Largest central |grad u| over interior nodes adjacent to the boundary.
double boundary_adjacent_gradient(const Field& f);

// Gradient nonlinearity: |g|^p, or its C^1 linear-growth truncation at k.
struct Nonlinearity
{
    double p = 3.0;
    std::optional<double> k;

    double value(double g) const;
    double slope(double g) const;
};

// F_k(g): |g|^p for |g| <= k, k^p + p k^(p-1)(|g| - k) beyond.
double truncated_power(double g, double p, double k);

using SourceFn = std::function<double(const Point&, double)>;
using BoundaryFn = std::function<double(const Point&, double)>;

struct SolverConfig
{
    double p = 3.0;
    int scheme_order = 2;
    double cfl_diffusion = 0.5;
    double cfl_advection = 0.5;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    // Numerical blow-up threshold on the boundary-adjacent gradient. Unset:
    // max(0.5 d_p h^-beta, cap_data_factor * |grad u0|_inf).
    std::optional<double> gradient_cap;
    double cap_data_factor = 2.0;
    // Extra snapshots when the boundary-adjacent gradient first passes
    // these fractions of the cap.
    std::vector<double> cap_snapshot_levels{0.5, 0.7, 0.8, 0.9, 0.95};
    SourceFn source;
    std::optional<double> truncation_level;
    // Evaluate the advective CFL at this gradient level (untruncated slope)
    // instead of the current gradient. Truncated runs with k <= cfl_level
    // then step on one fixed time grid, which the discrete comparison
    // between truncation levels needs.
    std::optional<double> cfl_level;
    BoundaryFn boundary_values;
    std::size_t max_steps = 500'000'000;
    // Series thinning: record when this much time passed (0: t_end/4000) or
    // the gradient grew by this factor since the last sample.
    double series_min_dt = 0.0;
    double series_growth = 1.02;
    // Pseudo-time elliptic solver.
    double elliptic_tol = 1e-10;
    std::size_t elliptic_max_steps = 50'000'000;
    double elliptic_max_time = 1e4;

    void validate() const;
};

enum class StopReason { Horizon, GradientCap, Instability };

std::string to_string(StopReason r);
StopReason stop_reason_from_string(const std::string& s);

struct Sample
{
    double t = 0.0;
    double value = 0.0;
};

struct RunRecord
{
    SolverConfig config;
    std::vector<Field> snapshots;
    std::vector<Sample> grad_max_series;
    std::vector<Sample> ut_max_series;
    StopReason stop_reason = StopReason::Horizon;
    std::optional<double> T_h;
    double gradient_cap = 0.0; // resolved cap (infinite for truncated runs)
    std::size_t steps = 0;
    // Index into snapshots of the last field before the cap was crossed.
    std::optional<std::size_t> precap_index;
    Field final_field;
};

// Right-hand side of u_t = Lap u + N(grad u) + g at interior nodes (zero on
// Dirichlet nodes).
std::vector<double> rate(const Field& f, const SolverConfig& cfg);

// CFL step: min(sd h^2/(2n), sa h / N'(max(G, 1))).
double stable_dt(const Field& f, const SolverConfig& cfg);

// One forward-Euler stage with the given dt; boundary nodes reset to their
// Dirichlet data at time + dt.
Field euler_stage(const Field& f, const SolverConfig& cfg, double dt);

// One Heun (SSP-RK2) step with the given dt.
Field heun_step(const Field& f, const SolverConfig& cfg, double dt);

// One Heun step with the CFL time step.
Field step(const Field& f, const SolverConfig& cfg);

double default_gradient_cap(const Field& u0, const SolverConfig& cfg);

RunRecord run(const Field& u0, const SolverConfig& cfg);

// Run with the nonlinearity truncated at level k; never stops on the cap.
RunRecord truncated_run(const Field& u0, double k, const SolverConfig& cfg);

struct EllipticResult
{
    Field u;
    double residual = 0.0;
    bool converged = false;
    std::size_t steps = 0;
    double pseudo_time = 0.0;
};

// Pseudo-time marching of u_t = Lap u + |grad u|^p + f from u = 0 until the
// discrete residual drops below cfg.elliptic_tol.
EllipticResult solve_elliptic(const Field& forcing, const SolverConfig& cfg);

} // namespace dhj
