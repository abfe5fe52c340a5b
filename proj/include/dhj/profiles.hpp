#pragma once

#include "dhj/error.hpp"

#include <functional>

namespace dhj {

// Exponent-derived constants of the half-space profiles
//   U_0(s) = c_p s^(1-beta),  U_0'(s) = d_p s^(-beta),  beta = 1/(p-1).
struct Constants
{
    double p = 3.0;
    double beta = 0.5;
    double c_p = 0.0;
    double d_p = 0.0;
};

// Throws dhj::Error unless p > 2.
Constants constants(double p);

// Raised by dU at the singular point alpha = s = 0.
class SingularProfile : public Error
{
public:
    using Error::Error;
};

// Raised by ode_profile when the profile ceases to exist (bracket <= 0).
class ProfileBreakdown : public Error
{
public:
    using Error::Error;
};

// Shifted half-space solution U_alpha(s) = U_0(alpha + s) - U_0(alpha).
double U(double alpha, double s, const Constants& c);

// Its derivative d_p (alpha + s)^(-beta).
double dU(double alpha, double s, const Constants& c);

// Slope of the solution of -w'' = |w'|^p with w'(1) = g1:
//   [g1^(1-p) + (p-1)(y-1)]^(-beta).
double ode_profile(double g1, double y, const Constants& c);

struct SlopeBounds
{
    double lower = 0.0;
    double upper = 0.0;
};

// Two-sided normal-slope envelope at distance delta from a boundary point
// with slope g_b, widened by (1 +/- eps).
SlopeBounds spacetime_bounds(double g_b, double delta, double eps, const Constants& c);

// f''(s) + |f'(s)|^p by 5-point central differences. The stencil must stay
// strictly above lower_limit (the location of a singularity, if any).
double ode_residual(const std::function<double(double)>& fn, double s, const Constants& c,
                    double h_fd = 1e-4, double lower_limit = -1e300);

// |x|^p with fast paths for integer exponents.
double abs_pow(double x, double p);

} // namespace dhj
