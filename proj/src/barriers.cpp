#include "dhj/barriers.hpp"

#include "dhj/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace dhj {

BarrierParams BarrierParams::make(double p, double k, double eta, double rho, double tau,
                                  double L, double c1, double m)
{
    BarrierParams bp;
    bp.p = p;
    bp.k = k;
    bp.eta = eta;
    bp.rho = rho;
    bp.tau = tau;
    bp.L = L;
    bp.c1 = c1;
    bp.m = m;
    bp.kappa = k / (1.0 - constants(p).beta);
    bp.validate();
    return bp;
}

void BarrierParams::validate() const
{
    const Constants c = constants(p);
    if (!(k > 0.0 && k < c.d_p)) throw Error("barrier: need 0 < k < d_p");
    if (!(eta > 0.0 && eta < 1.0)) throw Error("barrier: need eta in (0, 1)");
    if (!(m > 0.0 && m < 1.0)) throw Error("barrier: need m in (0, 1)");
    if (!(rho > 0.0) || !(tau > 0.0)) throw Error("barrier: rho and tau must be positive");
    if (!(L >= 0.0)) throw Error("barrier: L must be nonnegative");
    if (std::abs(kappa * (1.0 - c.beta) - k) > 1e-12) throw Error("barrier: kappa must equal k/(1-beta)");
}

double lemma71_coefficient(const BarrierParams& bp)
{
    const Constants c = constants(bp.p);
    if (!(bp.k > 0.0) || !(bp.eta >= 0.0)) throw Error("lemma71: need k > 0 and eta >= 0");
    return -c.beta * bp.k + (1.0 + bp.eta) * std::pow(bp.k, bp.p) + bp.c1 * bp.eta;
}

namespace {

// log q(s) for s in (0, 1), q = f(s) / (f(s) + f(1 - s)), f(s) = exp(-1/s).
double log_ramp(double s)
{
    const double a = -1.0 / s;
    const double b = -1.0 / (1.0 - s);
    const double m = std::max(a, b);
    return a - (m + std::log(std::exp(a - m) + std::exp(b - m)));
}

struct RampDerivs
{
    double q = 0.0;
    double dq = 0.0;
    double ddq = 0.0;
};

RampDerivs ramp_derivs(double s)
{
    RampDerivs r;
    if (s <= 0.0) return r;
    if (s >= 1.0) {
        r.q = 1.0;
        return r;
    }
    r.q = std::exp(log_ramp(s));
    const double w = 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));
    const double dw = -2.0 / (s * s * s) + 2.0 / std::pow(1.0 - s, 3);
    r.dq = r.q * (1.0 - r.q) * w;
    r.ddq = r.q * (1.0 - r.q) * ((1.0 - 2.0 * r.q) * w * w + dw);
    return r;
}

// Both scale-free ratios at u = |x|/R in (1/2, 1), computed through
// q^(1-m) to stay finite where Theta underflows.
std::pair<double, double> cutoff_ratios(double u, double m, int dim)
{
    const double s = 2.0 - 2.0 * u;
    if (s <= 0.0 || s >= 1.0) return {0.0, 0.0};
    const double lq = log_ramp(s);
    const double q = std::exp(lq);
    const double q1m = std::exp((1.0 - m) * lq);
    const double w = 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));
    const double dw = -2.0 / (s * s * s) + 2.0 / std::pow(1.0 - s, 3);
    const double dq_m = (1.0 - q) * w * q1m;                              // q' / q^m
    const double ddq_m = q1m * (1.0 - q) * ((1.0 - 2.0 * q) * w * w + dw); // q'' / q^m
    const double r1 = 2.0 * dq_m;
    const double lap = 4.0 * ddq_m - (dim - 1) * (2.0 / u) * dq_m;
    const double r2 = std::abs(lap) + 16.0 * q1m * (1.0 - q) * (1.0 - q) * w * w;
    return {r1, r2};
}

} // namespace

double ramp(double s)
{
    return ramp_derivs(s).q;
}

double cutoff_constant(double m, int dim)
{
    if (!(m > 0.0 && m < 1.0)) throw Error("cutoff: need m in (0, 1)");
    if (dim < 1) throw Error("cutoff: dimension must be positive");
    static std::mutex mu;
    static std::map<std::pair<double, int>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(m, dim);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    constexpr std::size_t n = 200000;
    double sup = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double u = 0.5 + 0.5 * static_cast<double>(i) / n;
        const auto [r1, r2] = cutoff_ratios(u, m, dim);
        sup = std::max({sup, r1, r2});
    }
    const double C = sup * 1.001; // grid-to-supremum margin
    cache.emplace(key, C);
    return C;
}

CutoffValue cutoff(const Point& x, double R, double m, int dim)
{
    if (!(R > 0.0)) throw Error("cutoff: R must be positive");
    CutoffValue v;
    v.C_m = cutoff_constant(m, dim);
    const double r = std::hypot(x[0], x[1]);
    const double s = 2.0 - 2.0 * r / R;
    const RampDerivs q = ramp_derivs(s);
    v.theta = q.q;
    if (r > 0.0 && s > 0.0 && s < 1.0) {
        const double dr = -2.0 / R * q.dq;
        v.grad = {dr * x[0] / r, dr * x[1] / r};
        v.laplacian = 4.0 / (R * R) * q.ddq + (dim - 1) / r * dr;
        const auto [r1, r2] = cutoff_ratios(r / R, m, dim);
        v.ratio_gradient = r1;
        v.ratio_second = r2;
    }
    v.bound_check = v.ratio_gradient <= v.C_m && v.ratio_second <= v.C_m;
    return v;
}

double eta_recipe(double c, double rho, double tau, double p)
{
    const Constants k = constants(p);
    return c * std::pow(rho * rho / tau + 1.0, -1.0 / (1.0 - k.beta));
}

double lemma72_residual(const BarrierParams& bp, double x, double t)
{
    bp.validate();
    if (!(x > 0.0 && x < 2.0 * bp.rho)) throw Error("lemma72: x outside (0, 2 rho)");
    if (!(t > 0.0 && t < bp.tau)) throw Error("lemma72: t outside (t0, t1)");
    const Constants c = constants(bp.p);
    const double beta = c.beta;
    const double g = 1.0 / (1.0 - beta);
    const double er = bp.eta * bp.rho;
    const double er_pow = std::pow(er, 1.0 - beta);
    const double h = t / bp.tau;

    // psi = Theta^2 in the scaled variable, Theta(r) = ramp(2 - 2r)
    auto psi = [](double r, double& dpsi) {
        const RampDerivs q = ramp_derivs(2.0 - 2.0 * r);
        dpsi = 2.0 * q.q * (-2.0 * q.dq);
        return q.q * q.q;
    };
    auto phi_parts = [&](double xx, double& phi, double& phi_x, double& P_x, double& ps) {
        double dps;
        ps = psi(xx / bp.rho, dps);
        const double hp = h * ps;
        phi = er * std::pow(hp, g);
        phi_x = er * g * std::pow(hp, g - 1.0) * h * dps / bp.rho;
        P_x = er_pow * h * dps / bp.rho;
    };
    auto V_x = [&](double xx) {
        double phi, phi_x, P_x, ps;
        phi_parts(xx, phi, phi_x, P_x, ps);
        return bp.kappa * ((1.0 - beta) * std::pow(xx + phi, -beta) * (1.0 + phi_x) - P_x);
    };

    double phi, phi_x, P_x, ps;
    phi_parts(x, phi, phi_x, P_x, ps);
    const double phi_t = er * g * std::pow(h * ps, g - 1.0) * ps / bp.tau;
    const double P_t = er_pow * ps / bp.tau;
    const double Vt = bp.kappa * ((1.0 - beta) * std::pow(x + phi, -beta) * phi_t - P_t);
    const double Vx = bp.kappa * ((1.0 - beta) * std::pow(x + phi, -beta) * (1.0 + phi_x) - P_x);

    double hs = 1e-5 * bp.rho;
    if (2.0 * hs >= x) hs = x / 4.0;
    const double Vxx =
        (-V_x(x + 2 * hs) + 8.0 * V_x(x + hs) - 8.0 * V_x(x - hs) + V_x(x - 2 * hs)) / (12.0 * hs);

    double res = Vt - Vxx - abs_pow(Vx, bp.p);
    if (bp.L > 0.0) res -= bp.kappa * (1.0 - beta) * std::pow(x + phi, -beta) * bp.L;
    return res;
}

BarrierSweep lemma72_sweep(const BarrierParams& bp, std::size_t nx, std::size_t nt)
{
    if (nx == 0 || nt == 0) throw Error("lemma72: empty sweep grid");
    BarrierSweep s;
    s.eta = bp.eta;
    s.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nt; ++j) {
        const double t = bp.tau * (j + 0.5) / nt;
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = 2.0 * bp.rho * (i + 0.5) / nx;
            const double r = lemma72_residual(bp, x, t);
            if (r < s.min_residual) {
                s.min_residual = r;
                s.argmin_x = x;
                s.argmin_t = t;
            }
        }
    }
    return s;
}

BarrierSweep lemma72_search(BarrierParams bp, const std::vector<double>& c_values, double floor,
                            std::size_t nx, std::size_t nt)
{
    if (c_values.empty()) throw Error("lemma72: no candidate constants");
    BarrierSweep best;
    best.min_residual = -std::numeric_limits<double>::infinity();
    for (double c : c_values) {
        bp.eta = eta_recipe(c, bp.rho, bp.tau, bp.p);
        BarrierSweep s = lemma72_sweep(bp, nx, nt);
        s.c = c;
        s.feasible = s.min_residual >= -floor;
        if (s.feasible) return s;
        if (s.min_residual > best.min_residual) best = s;
    }
    return best;
}

FluxBound lemma72_flux(const BarrierParams& bp, double c, double t)
{
    bp.validate();
    if (!(t > 0.0)) throw Error("lemma72_flux: need t > t0");
    if (!(c > 0.0)) throw Error("lemma72_flux: need c > 0");
    const Constants k = constants(bp.p);
    const double beta = k.beta;
    FluxBound f;
    f.time_exponent = beta / (1.0 - beta);
    f.rho_exponent = -beta;
    f.value = bp.k * std::pow(c, -beta) * std::pow(bp.rho, -beta) *
              std::pow((bp.tau + bp.rho * bp.rho) / t, f.time_exponent);
    const double phi_wall = bp.eta * bp.rho * std::pow(t / bp.tau, 1.0 / (1.0 - beta));
    f.wall_slope = (1.0 - beta) * bp.kappa * std::pow(phi_wall, -beta);
    f.exponents_ok = std::abs(f.time_exponent - 1.0 / (bp.p - 2.0)) <= 1e-14 * (1.0 + f.time_exponent) &&
                     std::abs(f.rho_exponent + 1.0 / (bp.p - 1.0)) <= 1e-14;
    return f;
}

double lemma73_bracket(double N, double M, double R, double dt, double p)
{
    if (!(N > 0.0 && M > 0.0 && R > 0.0 && dt > 0.0)) throw Error("lemma73: inputs must be positive");
    if (!(p > 2.0)) throw Error("lemma73: need p > 2");
    return N + std::pow(M, 1.0 / p) + std::pow(R, -1.0 / (p - 1.0)) +
           std::pow(dt, -1.0 / (2.0 * (p - 1.0)));
}

Lemma73Check lemma73_crosscheck(double p, const std::vector<double>& amplitudes,
                                const std::vector<double>& dts, double R, double h)
{
    if (amplitudes.empty() || dts.empty()) throw Error("lemma73: empty parameter grid");
    std::vector<double> checkpoints = dts;
    std::sort(checkpoints.begin(), checkpoints.end());
    auto grid = std::make_shared<const Grid>(DomainSpec::interval(1.0), h);
    SolverConfig cfg;
    cfg.p = p;
    const double pi = std::acos(-1.0);

    Lemma73Check out;
    for (double A : amplitudes) {
        Field f = Field::sample(grid, [&](const Point& x) { return A * std::sin(pi * x[0]); });
        double N = 0.0, M = 0.0, G = 0.0;
        auto boundary_grad = [&](const Field& u) { return std::abs(gradient(u)[0][0]); };
        N = boundary_grad(f);
        std::size_t next = 0;
        while (next < checkpoints.size()) {
            double dt = stable_dt(f, cfg);
            bool hit = false;
            if (f.time + dt >= checkpoints[next]) {
                dt = checkpoints[next] - f.time;
                hit = true;
            }
            Field g = heun_step(f, cfg, dt);
            if (!g.valid()) throw Error("lemma73: solver produced non-finite values");
            if (hit) g.time = checkpoints[next];
            const Gradient grad = gradient(g);
            for (std::size_t n = 1; n + 1 < grid->size(); ++n) {
                const double x = grid->node(n)[0];
                if (x < R) M = std::max(M, std::abs(g.values[n] - f.values[n]) / dt);
                if (x <= 0.5 * R) G = std::max(G, std::abs(grad[n][0]));
            }
            N = std::max(N, boundary_grad(g));
            f = std::move(g);
            if (hit) {
                Lemma73Case cs;
                cs.amplitude = A;
                cs.dt = checkpoints[next];
                cs.N = N;
                cs.M = M;
                cs.gradient = G;
                cs.bracket = lemma73_bracket(N, M, R, cs.dt, p);
                cs.ratio = G / cs.bracket;
                out.cases.push_back(cs);
                ++next;
            }
        }
    }
    for (const auto& cs : out.cases) out.C_fit = std::max(out.C_fit, cs.ratio);
    for (const auto& cs : out.cases)
        out.max_violation = std::max(out.max_violation, cs.gradient / (out.C_fit * cs.bracket) - 1.0);
    out.max_violation = std::max(out.max_violation, 0.0);
    return out;
}

} // namespace dhj
