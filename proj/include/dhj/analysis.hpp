#pragma once

#include "dhj/solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dhj {

// Log-log least-squares fit g ~ A s^(-b).
struct ProfileFit
{
    double b = 0.0;
    double A = 0.0;
    double residual = 0.0; // RMS of log residuals
    double s_min = 0.0;
    double s_max = 0.0;
    std::size_t samples = 0;
};

struct WorstNode
{
    std::size_t index = 0;
    Point x{};
    double value = 0.0;
};

struct MonitorReport
{
    std::string name;
    bool passed = true;
    std::optional<WorstNode> worst_node;
    std::map<std::string, double> fitted_constants;
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

struct ProfileSample
{
    double s = 0.0;
    double g = 0.0;
};

// Linear (1D, radial) or bilinear (rectangle) interpolation of nodal values.
double interpolate(const Grid& g, const std::vector<double>& values, const Point& x);

// Normal derivative grad u . nu at every node (0 where nu is undefined).
std::vector<double> normal_derivative(const Field& f);

// ---- Bernstein bound ------------------------------------------------------

struct BernsteinOptions
{
    double budget = 0.0;       // pass iff C* <= budget
    double min_distance = 0.0; // skip nodes closer than this to the boundary
    // Compare against max(d_p delta^-beta, |grad_h U_0(delta)|), the
    // profile's own discrete gradient, so that the exact profile is an
    // equality case on the grid as well.
    bool discrete_scale = true;
};

MonitorReport bernstein_monitor(const Field& f, double eps, const Constants& c,
                                const BernsteinOptions& opt = {});

// ---- profile fits ---------------------------------------------------------

// Requires at least 5 samples, all with s > 0 and g > 0.
ProfileFit fit_profile(const std::vector<ProfileSample>& samples);

// Boundary point with the largest one-sided normal slope.
Point gbu_point(const Field& f);

// (s, u_nu(a + s nu_a)) at spacing h for s in [s_min, s_max]; samples with
// u_nu <= 0 are dropped.
std::vector<ProfileSample> normal_profile(const Field& f, const Point& a, double s_min,
                                          double s_max);

// One-sided normal slope at the boundary point a.
double boundary_slope(const Field& f, const Point& a);

// [8h, min(0.1, delta_0 / 2)]
std::pair<double, double> default_profile_window(const Grid& g);

// ---- ODE-type behaviour ---------------------------------------------------

struct DominanceOptions
{
    double activity_threshold = 0.5;
    double tolerance = 0.25;
};

MonitorReport ode_dominance(const Field& f, const Field& prev, const Constants& c,
                            const DominanceOptions& opt = {});

struct TangentialOptions
{
    std::optional<int> face;          // restrict to nodes projecting on this face
    std::optional<double> max_distance; // band width
};

MonitorReport tangential_monitor(const Field& f, double eps, const Constants& c,
                                 const TangentialOptions& opt = {});

MonitorReport ut_monitor(const RunRecord& run, double t_a, double t_b);

MonitorReport normal_lowerbound(const RunRecord& run, double slack = 0.05);

struct AnisotropySample
{
    double r = 0.0;
    double value = 0.0;
};

// r^beta u_nu at boundary nodes on the face of a, at distance r from a,
// r in [r_min, r_max], sorted by increasing r.
std::vector<AnisotropySample> tangential_anisotropy(const Field& f, const Point& a,
                                                    const Constants& c, double r_min = 0.0,
                                                    double r_max = 1e300);

// ---- space-time sandwich --------------------------------------------------

struct SandwichResult
{
    std::size_t inside = 0;
    std::size_t total = 0;
    double g_b = 0.0;

    double fraction() const { return total ? static_cast<double>(inside) / total : 0.0; }
};

SandwichResult sandwich_check(const Field& f, const Point& a, double eps, double s_min,
                              double s_max, const Constants& c);

// ---- rescaling ------------------------------------------------------------

struct RescaleOptions
{
    double eta = 0.25;
    double R = 2.0;
    std::size_t samples = 200;
};

struct RescaleResult
{
    double alpha = 0.0;
    double distance = 0.0;
    bool degenerate = false;
};

RescaleResult rescale_compare(const Field& f, const Point& z, double lambda, const Constants& c,
                              const RescaleOptions& opt = {});

// ---- blow-up rate ---------------------------------------------------------

struct RateFit
{
    ProfileFit fit; // g ~ A (T* - t)^(-b)
    double t_star = 0.0;
};

// Uses samples with t <= t_last and g >= 3 g(0); needs at least 10.
RateFit gbu_rate_fit(const std::vector<Sample>& series, double t_last);
RateFit gbu_rate_fit(const RunRecord& run, const Constants& c);

} // namespace dhj
