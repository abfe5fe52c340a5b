#include "dhj/profiles.hpp"

#include <cmath>

namespace dhj {

double abs_pow(double x, double p)
{
    const double a = std::abs(x);
    if (p == 3.0) return a * a * a;
    if (p == 4.0) {
        const double a2 = a * a;
        return a2 * a2;
    }
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

Constants constants(double p)
{
    if (!(p > 2.0) || !std::isfinite(p))
        throw Error("exponent p must satisfy p > 2");
    Constants c;
    c.p = p;
    c.beta = 1.0 / (p - 1.0);
    c.c_p = (p - 1.0) / (p - 2.0) * std::pow(p - 1.0, -c.beta);
    c.d_p = std::pow(c.beta, c.beta);
    return c;
}

double U(double alpha, double s, const Constants& c)
{
    if (!(alpha >= 0.0) || !(s >= 0.0))
        throw Error("U: shift and distance must be nonnegative");
    if (s == 0.0) return 0.0;
    const double e = 1.0 - c.beta;
    return c.c_p * (std::pow(alpha + s, e) - std::pow(alpha, e));
}

double dU(double alpha, double s, const Constants& c)
{
    if (!(alpha >= 0.0) || !(alpha + s >= 0.0))
        throw Error("dU: shift must be nonnegative and alpha + s >= 0");
    if (alpha + s == 0.0)
        throw SingularProfile("dU: U_0' is singular at s = 0");
    return c.d_p * std::pow(alpha + s, -c.beta);
}

double ode_profile(double g1, double y, const Constants& c)
{
    if (!(g1 > 0.0))
        throw Error("ode_profile: slope at y = 1 must be positive");
    const double bracket = std::pow(g1, 1.0 - c.p) + (c.p - 1.0) * (y - 1.0);
    if (!(bracket > 0.0))
        throw ProfileBreakdown("ode_profile: solution ceases to exist at this y");
    return std::pow(bracket, -c.beta);
}

SlopeBounds spacetime_bounds(double g_b, double delta, double eps, const Constants& c)
{
    if (!(g_b > 0.0)) throw Error("spacetime_bounds: boundary slope must be positive");
    if (!(delta >= 0.0)) throw Error("spacetime_bounds: distance must be nonnegative");
    if (!(eps >= 0.0 && eps < 1.0)) throw Error("spacetime_bounds: eps must lie in [0, 1)");
    const double base = std::pow(g_b, 1.0 - c.p);
    const double q = (c.p - 1.0) * delta;
    return {std::pow(base + (1.0 + eps) * q, -c.beta), std::pow(base + (1.0 - eps) * q, -c.beta)};
}

double ode_residual(const std::function<double(double)>& fn, double s, const Constants& c,
                    double h_fd, double lower_limit)
{
    if (!(h_fd > 0.0)) throw Error("ode_residual: step must be positive");
    if (!(s - 2.0 * h_fd > lower_limit))
        throw Error("ode_residual: stencil reaches the singularity");
    const double fm2 = fn(s - 2.0 * h_fd);
    const double fm1 = fn(s - h_fd);
    const double f0 = fn(s);
    const double fp1 = fn(s + h_fd);
    const double fp2 = fn(s + 2.0 * h_fd);
    if (!std::isfinite(fm2) || !std::isfinite(fm1) || !std::isfinite(f0) || !std::isfinite(fp1)
        || !std::isfinite(fp2))
        throw Error("ode_residual: profile not finite on the stencil");
    const double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h_fd);
    const double d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h_fd * h_fd);
    return d2 + abs_pow(d1, c.p);
}

} // namespace dhj
