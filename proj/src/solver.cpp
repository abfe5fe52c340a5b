#include "dhj/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhj {

Field Field::zeros(std::shared_ptr<const Grid> g, double t)
{
    Field f;
    f.values.assign(g->size(), 0.0);
    f.grid = std::move(g);
    f.time = t;
    return f;
}

Field Field::sample(std::shared_ptr<const Grid> g, const std::function<double(const Point&)>& fn,
                    double t)
{
    Field f = zeros(std::move(g), t);
    for (std::size_t n = 0; n < f.values.size(); ++n)
        f.values[n] = fn(f.grid->node(n));
    return f;
}

bool Field::valid() const
{
    if (!grid || values.size() != grid->size()) return false;
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const
{
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double truncated_power(double g, double p, double k)
{
    const double a = std::abs(g);
    if (a <= k) return abs_pow(a, p);
    const double km1 = abs_pow(k, p - 1.0);
    return km1 * k + p * km1 * (a - k);
}

double Nonlinearity::value(double g) const
{
    return k ? truncated_power(g, p, *k) : abs_pow(g, p);
}

double Nonlinearity::slope(double g) const
{
    const double a = k ? std::min(std::abs(g), *k) : std::abs(g);
    return p * abs_pow(a, p - 1.0);
}

std::string to_string(StopReason r)
{
    switch (r) {
    case StopReason::Horizon: return "horizon";
    case StopReason::GradientCap: return "gradient_cap";
    case StopReason::Instability: return "instability";
    }
    return "?";
}

StopReason stop_reason_from_string(const std::string& s)
{
    if (s == "horizon") return StopReason::Horizon;
    if (s == "gradient_cap") return StopReason::GradientCap;
    if (s == "instability") return StopReason::Instability;
    throw Error("unknown stop reason '" + s + "'");
}

void SolverConfig::validate() const
{
    if (!(p > 2.0) || !std::isfinite(p)) throw Error("solver: p must satisfy p > 2");
    if (scheme_order != 2) throw Error("solver: only scheme_order = 2 is available");
    if (!(cfl_diffusion > 0.0 && cfl_diffusion <= 1.0))
        throw Error("solver: cfl_diffusion must lie in (0, 1]");
    if (!(cfl_advection > 0.0 && cfl_advection <= 1.0))
        throw Error("solver: cfl_advection must lie in (0, 1]");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("solver: t_end must be positive");
    if (gradient_cap && !(*gradient_cap > 0.0)) throw Error("solver: gradient_cap must be positive");
    if (cfl_level && !(*cfl_level > 0.0)) throw Error("solver: cfl_level must be positive");
    if (truncation_level && !(*truncation_level > 0.0))
        throw Error("solver: truncation level must be positive");
    for (double t : snapshot_times)
        if (!(t >= 0.0) || !std::isfinite(t)) throw Error("solver: snapshot times must be >= 0");
}

namespace {

void require_grid(const Field& f)
{
    if (!f.grid || f.values.size() != f.grid->size())
        throw Error("field does not match its grid");
}

void require_four_nodes(const Grid& g)
{
    if (g.nx() < 4 || (g.coords() == 2 && g.ny() < 4))
        throw Error("stencil needs at least 4 nodes per axis");
}

// Blend of the central difference toward the upwind (Osher-Sethian)
// magnitude. mu = 0 whenever the untruncated cell Peclet number is <= 1, so
// the resolved regime sees the plain central scheme. `slope` is the
// untruncated derivative of |.|^p with respect to this component, `limit`
// the diffusive bound 2/h (less the radial drift on the disk).
inline double blended_magnitude(double a, double b, double slope, double limit)
{
    const double c = 0.5 * (a + b);
    double mu = 0.0;
    if (slope > limit) mu = 1.0 - limit / slope;
    return std::max(0.0, std::abs(c) + mu * 0.5 * (b - a));
}

struct RateContext
{
    Nonlinearity nl;
    const SourceFn* source = nullptr;
    const std::vector<double>* node_source = nullptr;
};

// Evaluates the semi-discrete right-hand side; returns the CFL gradient
// bound G (max one-sided difference magnitude).
double eval_rate(const Grid& g, const std::vector<double>& u, double t, const RateContext& ctx,
                 std::vector<double>& out)
{
    const double h = g.h();
    const double ih = 1.0 / h;
    const double ih2 = ih * ih;
    const double p = ctx.nl.p;
    out.assign(u.size(), 0.0);
    double G = 0.0;

    auto add_source = [&](std::size_t n) {
        double s = 0.0;
        if (ctx.node_source) s += (*ctx.node_source)[n];
        if (ctx.source && *ctx.source) s += (*ctx.source)(g.node(n), t);
        return s;
    };

    switch (g.domain().shape()) {
    case Shape::Interval: {
        const std::size_t nx = g.nx();
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const double a = (u[i] - u[i - 1]) * ih;
            const double b = (u[i + 1] - u[i]) * ih;
            const double c = 0.5 * (a + b);
            const double slope = p * abs_pow(c, p - 1.0);
            const double gm = blended_magnitude(a, b, slope, 2.0 * ih);
            out[i] = (b - a) * ih + ctx.nl.value(gm) + add_source(i);
            G = std::max(G, std::max(std::abs(a), std::abs(b)));
        }
        break;
    }
    case Shape::Disk: {
        const std::size_t nx = g.nx();
        if (nx >= 2) {
            out[0] = 4.0 * (u[1] - u[0]) * ih2 + ctx.nl.value(0.0) + add_source(0);
            G = std::max(G, std::abs(u[1] - u[0]) * ih);
        }
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const double r = static_cast<double>(i) * h;
            const double a = (u[i] - u[i - 1]) * ih;
            const double b = (u[i + 1] - u[i]) * ih;
            const double c = 0.5 * (a + b);
            const double slope = p * abs_pow(c, p - 1.0);
            const double gm = blended_magnitude(a, b, slope, 2.0 * ih - 1.0 / r);
            out[i] = (b - a) * ih + c / r + ctx.nl.value(gm) + add_source(i);
            G = std::max(G, std::max(std::abs(a), std::abs(b)));
        }
        break;
    }
    case Shape::Rectangle: {
        const std::size_t nx = g.nx();
        const std::size_t ny = g.ny();
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                const std::size_t n = j * nx + i;
                const double ax = (u[n] - u[n - 1]) * ih;
                const double bx = (u[n + 1] - u[n]) * ih;
                const double ay = (u[n] - u[n - nx]) * ih;
                const double by = (u[n + nx] - u[n]) * ih;
                const double cx = 0.5 * (ax + bx);
                const double cy = 0.5 * (ay + by);
                const double cn = std::hypot(cx, cy);
                const double base = cn > 0.0 ? p * abs_pow(cn, p - 2.0) : 0.0;
                const double gx = blended_magnitude(ax, bx, base * std::abs(cx), 2.0 * ih);
                const double gy = blended_magnitude(ay, by, base * std::abs(cy), 2.0 * ih);
                out[n] = (bx - ax + by - ay) * ih + ctx.nl.value(std::hypot(gx, gy)) + add_source(n);
                const double mx = std::max(std::abs(ax), std::abs(bx));
                const double my = std::max(std::abs(ay), std::abs(by));
                G = std::max(G, std::hypot(mx, my));
            }
        }
        break;
    }
    }
    return G;
}

void apply_dirichlet(const Grid& g, std::vector<double>& u, double t, const BoundaryFn& bc)
{
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (!g.is_boundary(n)) continue;
        u[n] = bc ? bc(g.node(n), t) : 0.0;
    }
}

int spatial_dims(const Grid& g)
{
    return g.domain().space_dim();
}

double cfl_dt(const Grid& g, double G, const SolverConfig& cfg, const Nonlinearity& nl)
{
    const double h = g.h();
    const double diff = cfg.cfl_diffusion * h * h / (2.0 * spatial_dims(g));
    double adv_speed = nl.slope(std::max(G, 1.0));
    if (cfg.cfl_level) {
        // fixed speed, so runs sharing the level share the time grid
        const double level = std::max(*cfg.cfl_level, 1.0);
        adv_speed = cfg.p * abs_pow(level, cfg.p - 1.0);
        if (!nl.k && G > level) adv_speed = nl.slope(G);
    }
    const double adv = cfg.cfl_advection * h / adv_speed;
    return std::min(diff, adv);
}

Nonlinearity nonlinearity_of(const SolverConfig& cfg)
{
    return Nonlinearity{cfg.p, cfg.truncation_level};
}

// Stateful integrator shared by the parabolic and pseudo-time drivers.
class Integrator
{
public:
    Integrator(const Grid& g, const SolverConfig& cfg, const std::vector<double>* node_source = nullptr)
        : grid_(g), cfg_(cfg)
    {
        ctx_.nl = nonlinearity_of(cfg);
        ctx_.source = &cfg_.source;
        ctx_.node_source = node_source;
    }

    // Rate at (u, t); returns G.
    double rate(const std::vector<double>& u, double t, std::vector<double>& out) const
    {
        return eval_rate(grid_, u, t, ctx_, out);
    }

    double dt_for(double G) const { return cfl_dt(grid_, G, cfg_, ctx_.nl); }

    // Heun step from (u, t) with step dt into out. k1 must hold rate(u, t).
    void heun(const std::vector<double>& u, double t, double dt, const std::vector<double>& k1,
              std::vector<double>& out)
    {
        stage_.resize(u.size());
        for (std::size_t n = 0; n < u.size(); ++n) stage_[n] = u[n] + dt * k1[n];
        apply_dirichlet(grid_, stage_, t + dt, cfg_.boundary_values);
        eval_rate(grid_, stage_, t + dt, ctx_, k2_);
        out.resize(u.size());
        for (std::size_t n = 0; n < u.size(); ++n)
            out[n] = 0.5 * (u[n] + stage_[n] + dt * k2_[n]);
        apply_dirichlet(grid_, out, t + dt, cfg_.boundary_values);
    }

private:
    const Grid& grid_;
    const SolverConfig& cfg_;
    RateContext ctx_;
    std::vector<double> stage_;
    std::vector<double> k2_;
};

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_gradient_norm(const Field& f)
{
    const Gradient g = gradient(f);
    double m = 0.0;
    for (const auto& v : g) m = std::max(m, std::hypot(v[0], v[1]));
    return m;
}

} // namespace

Gradient gradient(const Field& f)
{
    require_grid(f);
    const Grid& g = *f.grid;
    require_four_nodes(g);
    const double h = g.h();
    const auto& u = f.values;
    Gradient out(u.size(), Point{0.0, 0.0});
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();

    auto dx = [&](std::size_t i, std::size_t j) {
        const std::size_t n = g.index(i, j);
        if (i == 0) return (-3.0 * u[n] + 4.0 * u[n + 1] - u[n + 2]) / (2.0 * h);
        if (i + 1 == nx) return (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
        return (u[n + 1] - u[n - 1]) / (2.0 * h);
    };
    auto dy = [&](std::size_t i, std::size_t j) {
        const std::size_t n = g.index(i, j);
        if (j == 0) return (-3.0 * u[n] + 4.0 * u[n + nx] - u[n + 2 * nx]) / (2.0 * h);
        if (j + 1 == ny) return (3.0 * u[n] - 4.0 * u[n - nx] + u[n - 2 * nx]) / (2.0 * h);
        return (u[n + nx] - u[n - nx]) / (2.0 * h);
    };

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t n = g.index(i, j);
            out[n][0] = dx(i, j);
            if (g.coords() == 2) out[n][1] = dy(i, j);
        }
    }
    if (g.domain().shape() == Shape::Disk) out[0][0] = 0.0;
    return out;
}

std::vector<Hessian> hessian(const Field& f)
{
    require_grid(f);
    const Grid& g = *f.grid;
    require_four_nodes(g);
    const double h = g.h();
    const double h2 = h * h;
    const auto& u = f.values;
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    std::vector<Hessian> out(u.size());

    auto second = [&](std::size_t n, std::size_t i, std::size_t len, std::size_t stride) {
        if (i == 0)
            return (2.0 * u[n] - 5.0 * u[n + stride] + 4.0 * u[n + 2 * stride] - u[n + 3 * stride]) / h2;
        if (i + 1 == len)
            return (2.0 * u[n] - 5.0 * u[n - stride] + 4.0 * u[n - 2 * stride] - u[n - 3 * stride]) / h2;
        return (u[n + stride] - 2.0 * u[n] + u[n - stride]) / h2;
    };

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t n = g.index(i, j);
            out[n].xx = second(n, i, nx, 1);
            if (g.coords() == 2) out[n].yy = second(n, j, ny, nx);
        }
    }
    if (g.domain().shape() == Shape::Disk)
        out[0].xx = 2.0 * (u[1] - u[0]) / h2;

    if (g.coords() == 2) {
        const Gradient grad = gradient(f);
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t n = g.index(i, j);
                double v;
                if (j == 0)
                    v = (-3.0 * grad[n][0] + 4.0 * grad[n + nx][0] - grad[n + 2 * nx][0]) / (2.0 * h);
                else if (j + 1 == ny)
                    v = (3.0 * grad[n][0] - 4.0 * grad[n - nx][0] + grad[n - 2 * nx][0]) / (2.0 * h);
                else
                    v = (grad[n + nx][0] - grad[n - nx][0]) / (2.0 * h);
                out[n].xy = v;
            }
        }
    }
    return out;
}

double boundary_adjacent_gradient(const Field& f)
{
    require_grid(f);
    const Grid& g = *f.grid;
    const auto& u = f.values;
    const double h = g.h();
    const std::size_t nx = g.nx();
    double m = 0.0;
    switch (g.domain().shape()) {
    case Shape::Interval:
        if (nx < 3) return 0.0;
        m = std::max(std::abs(u[2] - u[0]), std::abs(u[nx - 1] - u[nx - 3])) / (2.0 * h);
        break;
    case Shape::Disk:
        if (nx < 3) return 0.0;
        m = std::abs(u[nx - 1] - u[nx - 3]) / (2.0 * h);
        break;
    case Shape::Rectangle: {
        const std::size_t ny = g.ny();
        if (nx < 3 || ny < 3) return 0.0;
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                if (i != 1 && i + 2 != nx && j != 1 && j + 2 != ny) continue;
                const std::size_t n = j * nx + i;
                const double cx = (u[n + 1] - u[n - 1]) / (2.0 * h);
                const double cy = (u[n + nx] - u[n - nx]) / (2.0 * h);
                m = std::max(m, std::hypot(cx, cy));
            }
        }
        break;
    }
    }
    return m;
}

std::vector<double> rate(const Field& f, const SolverConfig& cfg)
{
    require_grid(f);
    std::vector<double> out;
    RateContext ctx;
    ctx.nl = nonlinearity_of(cfg);
    ctx.source = &cfg.source;
    eval_rate(*f.grid, f.values, f.time, ctx, out);
    return out;
}

double stable_dt(const Field& f, const SolverConfig& cfg)
{
    require_grid(f);
    std::vector<double> scratch;
    RateContext ctx;
    ctx.nl = nonlinearity_of(cfg);
    const double G = eval_rate(*f.grid, f.values, f.time, ctx, scratch);
    return cfl_dt(*f.grid, G, cfg, ctx.nl);
}

Field euler_stage(const Field& f, const SolverConfig& cfg, double dt)
{
    const std::vector<double> k = rate(f, cfg);
    Field out = f;
    for (std::size_t n = 0; n < k.size(); ++n) out.values[n] += dt * k[n];
    out.time = f.time + dt;
    apply_dirichlet(*f.grid, out.values, out.time, cfg.boundary_values);
    return out;
}

Field heun_step(const Field& f, const SolverConfig& cfg, double dt)
{
    require_grid(f);
    Integrator integ(*f.grid, cfg);
    std::vector<double> k1;
    integ.rate(f.values, f.time, k1);
    Field out = f;
    integ.heun(f.values, f.time, dt, k1, out.values);
    out.time = f.time + dt;
    return out;
}

Field step(const Field& f, const SolverConfig& cfg)
{
    return heun_step(f, cfg, stable_dt(f, cfg));
}

double default_gradient_cap(const Field& u0, const SolverConfig& cfg)
{
    const Constants c = constants(cfg.p);
    const double grid_cap = 0.5 * c.d_p * std::pow(u0.grid->h(), -c.beta);
    return std::max(grid_cap, cfg.cap_data_factor * max_gradient_norm(u0));
}

RunRecord run(const Field& u0, const SolverConfig& cfg)
{
    cfg.validate();
    require_grid(u0);
    if (!u0.valid()) throw Error("run: initial field has non-finite values");
    const Grid& g = *u0.grid;

    RunRecord rec;
    rec.config = cfg;
    const bool capped = !cfg.truncation_level;
    rec.gradient_cap = capped ? (cfg.gradient_cap ? *cfg.gradient_cap : default_gradient_cap(u0, cfg))
                              : std::numeric_limits<double>::infinity();

    std::vector<double> snap_times = cfg.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t next_snap = 0;
    std::vector<double> levels = cfg.cap_snapshot_levels;
    std::sort(levels.begin(), levels.end());
    std::size_t next_level = 0;

    const double min_dt = cfg.series_min_dt > 0.0 ? cfg.series_min_dt : cfg.t_end / 4000.0;

    Integrator integ(g, cfg);
    std::vector<double> u = u0.values;
    double t = u0.time;
    const double t_stop = u0.time + cfg.t_end;
    std::vector<double> k1, next;

    auto push_snapshot = [&](const std::vector<double>& vals, double time) {
        if (!rec.snapshots.empty() && rec.snapshots.back().time == time) return;
        Field s;
        s.grid = u0.grid;
        s.values = vals;
        s.time = time;
        rec.snapshots.push_back(std::move(s));
    };

    Field probe;
    probe.grid = u0.grid;
    auto full_grad_max = [&](const std::vector<double>& vals) {
        probe.values = vals;
        return g.nx() >= 4 ? max_gradient_norm(probe) : 0.0;
    };

    while (next_snap < snap_times.size() && snap_times[next_snap] <= t) {
        push_snapshot(u, t);
        ++next_snap;
    }

    double last_series_t = t;
    double last_series_g = full_grad_max(u);
    rec.grad_max_series.push_back({t, last_series_g});
    rec.ut_max_series.push_back({t, 0.0});
    bool ut_initialised = false;

    probe.values = u;
    if (capped && boundary_adjacent_gradient(probe) > rec.gradient_cap) {
        rec.stop_reason = StopReason::GradientCap;
        rec.T_h = t;
        push_snapshot(u, t);
        rec.precap_index = rec.snapshots.size() - 1;
        rec.final_field = probe;
        rec.final_field.time = t;
        return rec;
    }

    double G = integ.rate(u, t, k1);
    while (t < t_stop) {
        if (rec.steps >= cfg.max_steps) throw Error("run: step budget exhausted");
        double dt = integ.dt_for(G);
        bool last = false;
        if (t + dt >= t_stop) {
            dt = t_stop - t;
            last = true;
        }
        integ.heun(u, t, dt, k1, next);
        const double t_new = last ? t_stop : t + dt;
        ++rec.steps;

        if (!all_finite(next)) {
            rec.stop_reason = StopReason::Instability;
            break;
        }

        double ut = 0.0;
        for (std::size_t n = 0; n < u.size(); ++n) ut = std::max(ut, std::abs(next[n] - u[n]));
        ut /= dt;
        if (!ut_initialised) {
            rec.ut_max_series.front().value = ut;
            ut_initialised = true;
        }

        // requested snapshots inside (t, t_new], linear in time
        while (next_snap < snap_times.size() && snap_times[next_snap] <= t_new) {
            const double ts = snap_times[next_snap];
            const double w = (ts - t) / (t_new - t);
            std::vector<double> v(u.size());
            for (std::size_t n = 0; n < u.size(); ++n) v[n] = (1.0 - w) * u[n] + w * next[n];
            push_snapshot(v, ts);
            ++next_snap;
        }

        if (capped) {
            probe.values = next;
            const double bag = boundary_adjacent_gradient(probe);
            if (bag > rec.gradient_cap) {
                rec.stop_reason = StopReason::GradientCap;
                rec.T_h = t_new;
                push_snapshot(u, t);
                rec.precap_index = rec.snapshots.size() - 1;
                break;
            }
            while (next_level < levels.size() && bag > levels[next_level] * rec.gradient_cap) {
                push_snapshot(next, t_new);
                ++next_level;
            }
        }

        G = integ.rate(next, t_new, k1);
        const bool record_due = t_new - last_series_t >= min_dt || last;
        double gm = -1.0;
        if (!record_due) {
            // cheap growth trigger on the CFL bound, exact value when recording
            if (G > cfg.series_growth * last_series_g) gm = full_grad_max(next);
        }
        if (record_due || (gm >= 0.0 && gm > cfg.series_growth * last_series_g)) {
            if (gm < 0.0) gm = full_grad_max(next);
            rec.grad_max_series.push_back({t_new, gm});
            rec.ut_max_series.push_back({t_new, ut});
            last_series_t = t_new;
            last_series_g = gm;
        }

        u.swap(next);
        t = t_new;
    }

    rec.final_field.grid = u0.grid;
    rec.final_field.values = u;
    rec.final_field.time = t;
    return rec;
}

RunRecord truncated_run(const Field& u0, double k, const SolverConfig& cfg)
{
    if (!(k > 0.0)) throw Error("truncated_run: level k must be positive");
    SolverConfig c = cfg;
    c.truncation_level = k;
    c.gradient_cap.reset();
    return run(u0, c);
}

EllipticResult solve_elliptic(const Field& forcing, const SolverConfig& cfg)
{
    cfg.validate();
    require_grid(forcing);
    if (!forcing.valid()) throw Error("solve_elliptic: forcing must be finite");
    const Grid& g = *forcing.grid;

    SolverConfig c = cfg;
    c.truncation_level.reset();
    c.source = nullptr;
    Integrator integ(g, c, &forcing.values);

    EllipticResult res;
    res.u = Field::zeros(forcing.grid);
    std::vector<double> u(g.size(), 0.0);
    apply_dirichlet(g, u, 0.0, c.boundary_values);
    std::vector<double> k1, next;
    double t = 0.0;

    auto residual_of = [&](const std::vector<double>& r) {
        double m = 0.0;
        for (std::size_t n = 0; n < r.size(); ++n)
            if (!g.is_boundary(n)) m = std::max(m, std::abs(r[n]));
        return m;
    };

    double G = integ.rate(u, t, k1);
    res.residual = residual_of(k1);
    const double blowup = 1e8;
    while (res.residual > cfg.elliptic_tol) {
        if (res.steps >= cfg.elliptic_max_steps || t >= cfg.elliptic_max_time) break;
        const double dt = integ.dt_for(G);
        integ.heun(u, t, dt, k1, next);
        t += dt;
        ++res.steps;
        if (!all_finite(next)) break;
        u.swap(next);
        G = integ.rate(u, t, k1);
        res.residual = residual_of(k1);
        double umax = 0.0;
        for (double v : u) umax = std::max(umax, std::abs(v));
        if (umax > blowup || !std::isfinite(res.residual)) break;
    }
    res.converged = res.residual <= cfg.elliptic_tol;
    res.pseudo_time = t;
    res.u.values = u;
    return res;
}

} // namespace dhj
