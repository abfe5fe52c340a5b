#include "dhj/analysis.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dhj {

bool MonitorReport::has_flag(const std::string& f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Point& a, const Point& b)
{
    return a[0] * b[0] + a[1] * b[1];
}

double contract(const Hessian& H, const Point& a, const Point& b)
{
    return H.xx * a[0] * b[0] + H.xy * (a[0] * b[1] + a[1] * b[0]) + H.yy * a[1] * b[1];
}

// Interior nodes inside the unique-projection band with an unambiguous foot.
bool monitored(const Grid& g, std::size_t n)
{
    const Projection& pr = g.projections()[n];
    return !g.is_boundary(n) && !pr.ambiguous && pr.distance > 0.0 &&
           pr.distance < g.domain().unique_projection_width();
}

std::vector<double> component(const Gradient& grad, int k)
{
    std::vector<double> v(grad.size());
    for (std::size_t n = 0; n < grad.size(); ++n) v[n] = grad[n][k];
    return v;
}

Point ray_point(const Point& a, const Point& nu, double s)
{
    return {a[0] + s * nu[0], a[1] + s * nu[1]};
}

Projection boundary_frame(const DomainSpec& d, const Point& a)
{
    Projection pr = project(d, a);
    if (pr.distance > 1e-9 * std::max(d.length_x(), d.length_y()))
        throw Error("point is not on the boundary");
    if (pr.ambiguous) throw Error("boundary point has no unique normal (corner)");
    return pr;
}

template <class F>
double minimise_log(F&& obj, double lo, double hi)
{
    auto r = boost::math::tools::brent_find_minima(
        [&](double l) { return obj(std::exp(l)); }, std::log(lo), std::log(hi), 40);
    return std::exp(r.first);
}

} // namespace

double interpolate(const Grid& g, const std::vector<double>& values, const Point& x)
{
    const double h = g.h();
    auto locate = [h](double c, std::size_t n, std::size_t& i, double& w) {
        double q = c / h;
        if (q < 0.0) q = 0.0;
        const double top = static_cast<double>(n - 1);
        if (q > top) q = top;
        i = static_cast<std::size_t>(std::floor(q));
        if (i + 1 >= n) i = n - 2;
        w = q - static_cast<double>(i);
    };
    std::size_t i, j;
    double wx, wy;
    locate(x[0], g.nx(), i, wx);
    if (g.coords() == 1) return (1.0 - wx) * values[i] + wx * values[i + 1];
    locate(x[1], g.ny(), j, wy);
    const double v00 = values[g.index(i, j)];
    const double v10 = values[g.index(i + 1, j)];
    const double v01 = values[g.index(i, j + 1)];
    const double v11 = values[g.index(i + 1, j + 1)];
    return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11);
}

std::vector<double> normal_derivative(const Field& f)
{
    const Gradient grad = gradient(f);
    const auto& pr = f.grid->projections();
    std::vector<double> out(grad.size());
    for (std::size_t n = 0; n < grad.size(); ++n) out[n] = dot(grad[n], pr[n].normal);
    return out;
}

MonitorReport bernstein_monitor(const Field& f, double eps, const Constants& c,
                                const BernsteinOptions& opt)
{
    MonitorReport rep;
    rep.name = "bernstein";
    const Grid& g = *f.grid;
    const Gradient grad = gradient(f);

    Gradient scale_grad;
    if (opt.discrete_scale) {
        Field prof = Field::sample(f.grid, [&](const Point& x) {
            return U(0.0, distance(g.domain(), x), c);
        });
        scale_grad = gradient(prof);
    }

    double C = 0.0;
    double C_int = 0.0;
    double worst = -kInf;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!monitored(g, n)) continue;
        const double delta = g.projections()[n].distance;
        if (delta < opt.min_distance) continue;
        double scale = c.d_p * std::pow(delta, -c.beta);
        if (opt.discrete_scale) scale = std::max(scale, std::hypot(scale_grad[n][0], scale_grad[n][1]));
        const double excess = std::hypot(grad[n][0], grad[n][1]) - (1.0 + eps) * scale;
        if (excess > worst) {
            worst = excess;
            rep.worst_node = WorstNode{n, g.node(n), excess};
        }
        C = std::max(C, excess);
        const double lift = f.values[n] - (1.0 + eps) * c.c_p * std::pow(delta, 1.0 - c.beta);
        C_int = std::max(C_int, lift / delta);
    }
    rep.fitted_constants["C"] = C;
    rep.fitted_constants["C_integrated"] = C_int;
    rep.fitted_constants["eps"] = eps;
    rep.fitted_constants["budget"] = opt.budget;
    rep.passed = C <= opt.budget;
    return rep;
}

ProfileFit fit_profile(const std::vector<ProfileSample>& samples)
{
    if (samples.size() < 5) throw Error("fit_profile: need at least 5 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    ProfileFit fit;
    fit.s_min = kInf;
    fit.s_max = -kInf;
    for (const auto& q : samples) {
        if (!(q.s > 0.0) || !(q.g > 0.0) || !std::isfinite(q.s) || !std::isfinite(q.g))
            throw Error("fit_profile: samples must be positive and finite");
        const double x = std::log(q.s);
        const double y = std::log(q.g);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fit.s_min = std::min(fit.s_min, q.s);
        fit.s_max = std::max(fit.s_max, q.s);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n;
    const double my = sy / n;
    const double var = sxx / n - mx * mx;
    if (!(var > 0.0)) throw Error("fit_profile: abscissae must not coincide");
    const double slope = (sxy / n - mx * my) / var;
    const double icpt = my - slope * mx;
    fit.b = -slope;
    fit.A = std::exp(icpt);
    double ss = 0.0;
    for (const auto& q : samples) {
        const double r = std::log(q.g) - (icpt + slope * std::log(q.s));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.samples = samples.size();
    return fit;
}

Point gbu_point(const Field& f)
{
    const Grid& g = *f.grid;
    const Gradient grad = gradient(f);
    double best = -kInf;
    Point a{};
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!g.is_boundary(n)) continue;
        const Projection& pr = g.projections()[n];
        if (pr.ambiguous) continue;
        const double s = dot(grad[n], pr.normal);
        if (s > best) {
            best = s;
            a = g.node(n);
        }
    }
    if (best == -kInf) throw Error("gbu_point: no boundary node with a unique normal");
    return a;
}

double boundary_slope(const Field& f, const Point& a)
{
    const Grid& g = *f.grid;
    const Projection pr = boundary_frame(g.domain(), a);
    const Gradient grad = gradient(f);
    const double gx = interpolate(g, component(grad, 0), a);
    const double gy = g.coords() == 2 ? interpolate(g, component(grad, 1), a) : 0.0;
    return gx * pr.normal[0] + gy * pr.normal[1];
}

std::pair<double, double> default_profile_window(const Grid& g)
{
    return {8.0 * g.h(), std::min(0.1, 0.5 * g.domain().unique_projection_width())};
}

std::vector<ProfileSample> normal_profile(const Field& f, const Point& a, double s_min,
                                          double s_max)
{
    const Grid& g = *f.grid;
    const Projection pr = boundary_frame(g.domain(), a);
    const Gradient grad = gradient(f);
    const std::vector<double> gx = component(grad, 0);
    const std::vector<double> gy = component(grad, 1);
    const double h = g.h();
    std::vector<ProfileSample> out;
    const long k0 = static_cast<long>(std::ceil(s_min / h - 1e-9));
    const long k1 = static_cast<long>(std::floor(s_max / h + 1e-9));
    for (long k = std::max(k0, 1L); k <= k1; ++k) {
        const double s = static_cast<double>(k) * h;
        const Point x = ray_point(a, pr.normal, s);
        if (!g.domain().contains(x)) break;
        double un = interpolate(g, gx, x) * pr.normal[0];
        if (g.coords() == 2) un += interpolate(g, gy, x) * pr.normal[1];
        if (un > 0.0) out.push_back({s, un});
    }
    return out;
}

MonitorReport ode_dominance(const Field& f, const Field& prev, const Constants& c,
                            const DominanceOptions& opt)
{
    if (f.grid != prev.grid && (!prev.grid || prev.grid->size() != f.grid->size()))
        throw Error("ode_dominance: fields live on different grids");
    MonitorReport rep;
    rep.name = "ode_dominance";
    const Grid& g = *f.grid;
    const Gradient grad = gradient(f);
    const std::vector<Hessian> H = hessian(f);

    std::vector<double> dev;
    double worst = -1.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!monitored(g, n)) continue;
        const Projection& pr = g.projections()[n];
        const double un = dot(grad[n], pr.normal);
        if (!(un > 0.0) || std::pow(pr.distance, c.beta) * un < opt.activity_threshold * c.d_p)
            continue;
        const double r = contract(H[n], pr.normal, pr.normal) / abs_pow(un, c.p);
        const double d = std::abs(r + 1.0);
        dev.push_back(d);
        if (d > worst) {
            worst = d;
            rep.worst_node = WorstNode{n, g.node(n), r};
        }
    }

    const double dt = f.time - prev.time;
    if (dt > 0.0) {
        double ut = 0.0;
        for (std::size_t n = 0; n < f.values.size(); ++n)
            ut = std::max(ut, std::abs(f.values[n] - prev.values[n]));
        rep.fitted_constants["ut_max"] = ut / dt;
    }

    rep.fitted_constants["active_nodes"] = static_cast<double>(dev.size());
    if (dev.empty()) {
        rep.flags.push_back("inactive");
        rep.passed = true;
        return rep;
    }
    std::vector<double> tmp = dev;
    const std::size_t mid = tmp.size() / 2;
    std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
    double median = tmp[mid];
    if (tmp.size() % 2 == 0) {
        const double lower = *std::max_element(tmp.begin(), tmp.begin() + mid);
        median = 0.5 * (median + lower);
    }
    rep.fitted_constants["median"] = median;
    rep.fitted_constants["max"] = worst;
    rep.passed = median <= opt.tolerance;
    return rep;
}

MonitorReport tangential_monitor(const Field& f, double eps, const Constants& c,
                                 const TangentialOptions& opt)
{
    const Grid& g = *f.grid;
    if (g.coords() != 2) throw Error("tangential_monitor: needs a two-dimensional field");
    MonitorReport rep;
    rep.name = "tangential";
    const Gradient grad = gradient(f);
    const std::vector<Hessian> H = hessian(f);
    double C = 0.0;
    double worst = -kInf;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!monitored(g, n)) continue;
        const Projection& pr = g.projections()[n];
        if (opt.face && pr.face != *opt.face) continue;
        if (opt.max_distance && pr.distance > *opt.max_distance) continue;
        const Point nu = pr.normal;
        const Point tau{-nu[1], nu[0]};
        const double ut = dot(grad[n], tau);
        const double un = dot(grad[n], nu);
        const double val = std::abs(contract(H[n], tau, tau)) + std::abs(contract(H[n], nu, tau)) +
                           abs_pow(ut, c.p) - eps * abs_pow(un, c.p);
        if (val > worst) {
            worst = val;
            rep.worst_node = WorstNode{n, g.node(n), val};
        }
        C = std::max(C, val);
    }
    rep.fitted_constants["C_eps"] = C;
    rep.fitted_constants["eps"] = eps;
    rep.passed = std::isfinite(C);
    return rep;
}

MonitorReport ut_monitor(const RunRecord& run, double t_a, double t_b)
{
    MonitorReport rep;
    rep.name = "ut";
    double M = -1.0;
    double arg = 0.0;
    std::size_t count = 0;
    for (const auto& s : run.ut_max_series) {
        if (s.t < t_a || s.t > t_b) continue;
        ++count;
        if (s.value > M) {
            M = s.value;
            arg = s.t;
        }
    }
    if (count == 0) throw Error("ut_monitor: no samples in the window");
    rep.fitted_constants["M"] = M;
    rep.fitted_constants["argmax_t"] = arg;
    rep.fitted_constants["samples"] = static_cast<double>(count);
    rep.passed = std::isfinite(M);
    return rep;
}

MonitorReport normal_lowerbound(const RunRecord& run, double slack)
{
    MonitorReport rep;
    rep.name = "normal_lowerbound";
    std::vector<const Field*> fields;
    for (const auto& s : run.snapshots) fields.push_back(&s);
    if (run.final_field.grid &&
        (fields.empty() || fields.back()->time != run.final_field.time))
        fields.push_back(&run.final_field);
    if (fields.empty()) {
        rep.flags.push_back("inactive");
        return rep;
    }

    auto field_min = [&](const Field& f, std::optional<WorstNode>& where) {
        const Grid& g = *f.grid;
        const std::vector<double> un = normal_derivative(f);
        double m = kInf;
        for (std::size_t n = 0; n < g.size(); ++n) {
            const Projection& pr = g.projections()[n];
            if (pr.ambiguous || pr.distance >= g.domain().unique_projection_width()) continue;
            if (un[n] < m) {
                m = un[n];
                where = WorstNode{n, g.node(n), un[n]};
            }
        }
        return m;
    };

    std::optional<WorstNode> w0;
    const double first = field_min(*fields.front(), w0);
    double overall = first;
    rep.worst_node = w0;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        std::optional<WorstNode> w;
        const double m = field_min(*fields[i], w);
        if (m < overall) {
            overall = m;
            rep.worst_node = w;
        }
    }
    const double L = std::max(0.0, -first) + slack;
    rep.fitted_constants["min_u_nu"] = overall;
    rep.fitted_constants["first_min_u_nu"] = first;
    rep.fitted_constants["L_bound"] = L;
    rep.passed = overall >= -L;
    return rep;
}

std::vector<AnisotropySample> tangential_anisotropy(const Field& f, const Point& a,
                                                    const Constants& c, double r_min,
                                                    double r_max)
{
    const Grid& g = *f.grid;
    if (g.coords() != 2) throw Error("tangential_anisotropy: needs a two-dimensional field");
    const Projection pa = boundary_frame(g.domain(), a);
    const Gradient grad = gradient(f);
    std::vector<AnisotropySample> out;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!g.is_boundary(n)) continue;
        const Projection& pr = g.projections()[n];
        if (pr.ambiguous || pr.face != pa.face) continue;
        const Point x = g.node(n);
        const double r = std::hypot(x[0] - a[0], x[1] - a[1]);
        if (r <= 0.0 || r < r_min || r > r_max) continue;
        out.push_back({r, std::pow(r, c.beta) * dot(grad[n], pr.normal)});
    }
    std::sort(out.begin(), out.end(),
              [](const AnisotropySample& l, const AnisotropySample& r) { return l.r < r.r; });
    return out;
}

SandwichResult sandwich_check(const Field& f, const Point& a, double eps, double s_min,
                              double s_max, const Constants& c)
{
    SandwichResult res;
    res.g_b = boundary_slope(f, a);
    const Grid& g = *f.grid;
    const Projection pr = boundary_frame(g.domain(), a);
    const Gradient grad = gradient(f);
    const std::vector<double> gx = component(grad, 0);
    const std::vector<double> gy = component(grad, 1);
    const double h = g.h();
    const long k0 = static_cast<long>(std::ceil(s_min / h - 1e-9));
    const long k1 = static_cast<long>(std::floor(s_max / h + 1e-9));
    for (long k = std::max(k0, 1L); k <= k1; ++k) {
        const double s = static_cast<double>(k) * h;
        const Point x = ray_point(a, pr.normal, s);
        if (!g.domain().contains(x)) break;
        double un = interpolate(g, gx, x) * pr.normal[0];
        if (g.coords() == 2) un += interpolate(g, gy, x) * pr.normal[1];
        ++res.total;
        if (res.g_b > 0.0) {
            const SlopeBounds b = spacetime_bounds(res.g_b, s, eps, c);
            if (un >= b.lower && un <= b.upper) ++res.inside;
        }
    }
    return res;
}

RescaleResult rescale_compare(const Field& f, const Point& z, double lambda, const Constants& c,
                              const RescaleOptions& opt)
{
    if (!(lambda > 0.0)) throw Error("rescale_compare: lambda must be positive");
    if (!(opt.eta > 0.0 && opt.R > opt.eta) || opt.samples < 2)
        throw Error("rescale_compare: need 0 < eta < R and at least 2 samples");
    const Grid& g = *f.grid;
    const Projection pr = boundary_frame(g.domain(), z);
    if (lambda * opt.R > g.domain().unique_projection_width() * (1.0 + 1e-12))
        throw Error("rescale_compare: segment leaves the unique-projection region");

    std::vector<double> y(opt.samples), v(opt.samples);
    const double amp = std::pow(lambda, c.beta - 1.0);
    for (std::size_t i = 0; i < opt.samples; ++i) {
        y[i] = opt.eta + (opt.R - opt.eta) * static_cast<double>(i) / (opt.samples - 1);
        v[i] = amp * interpolate(g, f.values, ray_point(z, pr.normal, lambda * y[i]));
    }
    auto dist = [&](double alpha) {
        double m = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) m = std::max(m, std::abs(v[i] - U(alpha, y[i], c)));
        return m;
    };

    constexpr double lo = 1e-3, hi = 1e3;
    constexpr int n_grid = 121;
    std::vector<double> grid{0.0};
    for (int i = 0; i < n_grid; ++i)
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n_grid - 1)));
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = dist(grid[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }

    RescaleResult res;
    if (best + 1 == grid.size()) {
        res.alpha = hi;
        res.distance = best_d;
        res.degenerate = true;
        return res;
    }
    double a_lo, a_hi;
    if (best <= 1) {
        // between 0 and the second grid point: refine linearly
        auto r = boost::math::tools::brent_find_minima(dist, 0.0, grid[2], 40);
        res.alpha = r.first;
        res.distance = r.second;
    } else {
        a_lo = grid[best - 1];
        a_hi = grid[best + 1];
        res.alpha = minimise_log(dist, a_lo, a_hi);
        res.distance = dist(res.alpha);
    }
    if (best_d < res.distance) {
        res.alpha = grid[best];
        res.distance = best_d;
    }
    return res;
}

RateFit gbu_rate_fit(const std::vector<Sample>& series, double t_last)
{
    if (series.empty()) throw Error("gbu_rate_fit: empty series");
    const double g0 = series.front().value;
    std::vector<Sample> sel;
    for (const auto& s : series)
        if (s.t <= t_last && s.value > 0.0 && s.value >= 3.0 * g0) sel.push_back(s);
    if (sel.size() < 10 || !(g0 > 0.0))
        throw Error("gbu_rate_fit: insufficient dynamic range (need 10 samples above 3x the initial value)");

    const double span = std::max(t_last - sel.front().t, 1e-300);
    auto fit_at = [&](double gap) {
        std::vector<ProfileSample> q;
        q.reserve(sel.size());
        for (const auto& s : sel) q.push_back({t_last + gap - s.t, s.value});
        return fit_profile(q);
    };
    auto objective = [&](double gap) { return fit_at(gap).residual; };

    const double lo = 1e-6 * span, hi = 10.0 * span;
    constexpr int n_grid = 141;
    double best_gap = lo;
    double best_r = kInf;
    std::size_t best_i = 0;
    std::vector<double> gaps(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        gaps[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n_grid - 1));
        const double r = objective(gaps[i]);
        if (r < best_r) {
            best_r = r;
            best_gap = gaps[i];
            best_i = static_cast<std::size_t>(i);
        }
    }
    const double a = gaps[best_i == 0 ? 0 : best_i - 1];
    const double b = gaps[std::min<std::size_t>(best_i + 1, n_grid - 1)];
    if (b > a) {
        const double g = minimise_log(objective, a, b);
        if (objective(g) <= best_r) best_gap = g;
    }
    RateFit out;
    out.fit = fit_at(best_gap);
    out.t_star = t_last + best_gap;
    return out;
}

RateFit gbu_rate_fit(const RunRecord& run, const Constants& c)
{
    (void)c;
    if (run.stop_reason != StopReason::GradientCap || !run.T_h)
        throw Error("gbu_rate_fit: run did not stop at the gradient cap");
    return gbu_rate_fit(run.grad_max_series, *run.T_h);
}

} // namespace dhj
