#pragma once

#include "dhj/geometry.hpp"
#include "dhj/profiles.hpp"

#include <vector>

namespace dhj {

struct BarrierParams
{
    double p = 3.0;
    double k = 0.35;   // sub-critical amplitude, 0 < k < d_p
    double eta = 0.01; // smallness parameter
    double rho = 0.1;
    double tau = 1.0;  // t1 - t0
    double L = 0.0;    // bound on the Laplacian of the distance
    double c1 = 1.0;   // constant of the ODE comparison lemma
    double kappa = 0.0;
    double m = 0.5;    // cutoff exponent

    // Fills kappa = k / (1 - beta) and validates.
    static BarrierParams make(double p, double k, double eta, double rho, double tau,
                              double L = 0.0, double c1 = 1.0, double m = 0.5);
    void validate() const;
};

// -beta k + (1 + eta) k^p + c1 eta; negative iff k s^-beta is a strict
// supersolution of the comparison ODE.
double lemma71_coefficient(const BarrierParams& bp);

// Smooth monotone ramp: 0 for s <= 0, 1 for s >= 1.
double ramp(double s);

struct CutoffValue
{
    double theta = 0.0;
    Point grad{};
    double laplacian = 0.0;
    // R |grad Theta| / Theta^m and R^2 (|Lap Theta| + 4 |grad Theta|^2 / Theta) / Theta^m
    double ratio_gradient = 0.0;
    double ratio_second = 0.0;
    double C_m = 0.0;
    bool bound_check = false;
};

// Radial bump Theta(x) = ramp(2 - 2|x|/R) in `dim` dimensions.
CutoffValue cutoff(const Point& x, double R, double m, int dim = 2);

// Supremum of both ratios over |x| in (R/2, R), fitted on a dense grid
// (independent of R). Cached per (m, dim).
double cutoff_constant(double m, int dim = 2);

// eta = c (rho^2 / tau + 1)^(-1/(1-beta))
double eta_recipe(double c, double rho, double tau, double p);

// V_t - V_xx - |V_x|^p for the slab barrier at x in (0, 2 rho), t - t0 in
// (0, tau). With L > 0 the worst-case curvature term is subtracted.
double lemma72_residual(const BarrierParams& bp, double x, double t);

struct BarrierSweep
{
    double c = 0.0;
    double eta = 0.0;
    double min_residual = 0.0;
    double argmin_x = 0.0;
    double argmin_t = 0.0;
    bool feasible = false;
};

// Residual minimum over an nx x nt interior grid for fixed params.
BarrierSweep lemma72_sweep(const BarrierParams& bp, std::size_t nx = 200, std::size_t nt = 200);

// Tries eta = eta_recipe(c) for the given c values in order; returns the
// first sweep with min residual >= -floor (or the best one if none).
BarrierSweep lemma72_search(BarrierParams bp, const std::vector<double>& c_values,
                            double floor = 1e-6, std::size_t nx = 200, std::size_t nt = 200);

struct FluxBound
{
    double value = 0.0;        // k c^-beta rho^-beta ((tau + rho^2)/(t - t0))^(beta/(1-beta))
    double wall_slope = 0.0;   // (1 - beta) kappa phi^-beta at the wall, from eta
    double time_exponent = 0.0; // beta / (1 - beta)
    double rho_exponent = 0.0;  // -beta
    bool exponents_ok = false;  // time_exponent = 1/(p-2), rho_exponent = -1/(p-1)
};

// c is the eta-recipe constant (eta = eta_recipe(c, ...)).
FluxBound lemma72_flux(const BarrierParams& bp, double c, double t);

// N + M^(1/p) + R^(-1/(p-1)) + dt^(-1/(2(p-1)))
double lemma73_bracket(double N, double M, double R, double dt, double p);

struct Lemma73Case
{
    double amplitude = 0.0;
    double dt = 0.0;
    double N = 0.0;
    double M = 0.0;
    double gradient = 0.0; // max |grad u| over the half ball
    double bracket = 0.0;
    double ratio = 0.0;
};

struct Lemma73Check
{
    std::vector<Lemma73Case> cases;
    double C_fit = 0.0;
    double max_violation = 0.0;
};

// Runs the solver on Interval(1) from amplitude * sin(pi x) and compares the
// gradient near x0 = 0 (ball radius R) with the bracket.
Lemma73Check lemma73_crosscheck(double p, const std::vector<double>& amplitudes,
                                const std::vector<double>& dts, double R = 0.5, double h = 0.01);

} // namespace dhj
