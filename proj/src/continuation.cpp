#include "dhj/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace dhj {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Global: return "Global";
    case Verdict::GBUNoLoss: return "GBU-no-loss";
    case Verdict::GBULoss: return "GBU-loss";
    case Verdict::Undecided: return "Undecided";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s)
{
    if (s == "Global") return Verdict::Global;
    if (s == "GBU-no-loss") return Verdict::GBUNoLoss;
    if (s == "GBU-loss") return Verdict::GBULoss;
    if (s == "Undecided") return Verdict::Undecided;
    throw Error("unknown verdict '" + s + "'");
}

double default_tol_loss(const Grid& g, double p)
{
    const Constants c = constants(p);
    return 10.0 * std::pow(g.h(), 1.0 - c.beta) * c.c_p;
}

double boundary_trace_value(const Field& f)
{
    const Grid& g = *f.grid;
    const std::size_t nx = g.nx();
    const auto& u = f.values;
    double m = 0.0;
    switch (g.domain().shape()) {
    case Shape::Interval:
        if (nx >= 3) m = std::max(u[1], u[nx - 2]);
        break;
    case Shape::Disk:
        if (nx >= 3) m = u[nx - 2];
        break;
    case Shape::Rectangle: {
        const std::size_t ny = g.ny();
        for (std::size_t j = 1; j + 1 < ny; ++j)
            for (std::size_t i = 1; i + 1 < nx; ++i)
                if (i == 1 || i + 2 == nx || j == 1 || j + 2 == ny) m = std::max(m, u[g.index(i, j)]);
        break;
    }
    }
    return std::max(m, 0.0);
}

namespace {

double max_grad(const Field& f)
{
    double m = 0.0;
    for (const auto& v : gradient(f)) m = std::max(m, std::hypot(v[0], v[1]));
    return m;
}

std::vector<double> even_times(double a, double b, std::size_t n, bool include_a)
{
    std::vector<double> t;
    if (include_a) t.push_back(a);
    for (std::size_t i = 1; i <= n; ++i) t.push_back(a + (b - a) * static_cast<double>(i) / n);
    return t;
}

std::vector<double> split_times(double t0, double t_split, double t_end, std::size_t n_before,
                                std::size_t n_after)
{
    std::vector<double> t = even_times(t0, t_split, n_before, true);
    if (t_end > t_split) {
        const auto after = even_times(t_split, t_end, n_after, false);
        t.insert(t.end(), after.begin(), after.end());
    }
    return t;
}

} // namespace

LossResult boundary_loss(const ExtendedRun& ext, double tol_loss)
{
    LossResult r;
    for (const auto& s : ext.boundary_trace) {
        r.max_trace = std::max(r.max_trace, s.value);
        if (!r.loss_time && s.value > tol_loss) r.loss_time = s.t;
    }
    return r;
}

ExtendedRun viscosity_extend(const Field& u0, double horizon, const SolverConfig& cfg,
                             const ExtendOptions& opt)
{
    if (!(horizon > 0.0)) throw Error("viscosity_extend: horizon must be positive");
    ExtendedRun ext;
    ext.k_schedule = opt.k_schedule;
    if (ext.k_schedule.empty()) {
        if (opt.k_levels < 3) throw Error("viscosity_extend: need at least 3 truncation levels");
        const double k0 = std::max(opt.k0_factor * max_grad(u0), 1.0);
        for (std::size_t i = 0; i < opt.k_levels; ++i) ext.k_schedule.push_back(k0 * std::ldexp(1.0, static_cast<int>(i)));
    }
    if (ext.k_schedule.size() < 3) throw Error("viscosity_extend: need at least 3 truncation levels");
    for (std::size_t i = 0; i < ext.k_schedule.size(); ++i) {
        if (!(ext.k_schedule[i] > 0.0)) throw Error("viscosity_extend: truncation levels must be positive");
        if (i > 0 && !(ext.k_schedule[i] > ext.k_schedule[i - 1]))
            throw Error("viscosity_extend: k_schedule must be strictly increasing");
    }

    SolverConfig c = cfg;
    c.t_end = horizon;
    c.snapshot_times = opt.snapshot_times.empty()
                           ? even_times(u0.time, u0.time + horizon, opt.n_snapshots, true)
                           : opt.snapshot_times;
    std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
    c.snapshot_times.erase(std::unique(c.snapshot_times.begin(), c.snapshot_times.end()),
                           c.snapshot_times.end());
    c.snapshot_times.erase(std::remove_if(c.snapshot_times.begin(), c.snapshot_times.end(),
                                          [&](double t) { return t > u0.time + horizon; }),
                           c.snapshot_times.end());

    if (opt.shared_time_grid) c.cfl_level = ext.k_schedule.back();

    ext.runs.resize(ext.k_schedule.size());
    if (opt.parallel) {
        std::vector<std::future<RunRecord>> jobs;
        for (double k : ext.k_schedule)
            jobs.push_back(std::async(std::launch::async, [&, k] { return truncated_run(u0, k, c); }));
        for (std::size_t i = 0; i < jobs.size(); ++i) ext.runs[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < ext.k_schedule.size(); ++i)
            ext.runs[i] = truncated_run(u0, ext.k_schedule[i], c);
    }
    for (const auto& r : ext.runs) {
        if (r.stop_reason != StopReason::Horizon)
            throw Error("viscosity_extend: truncated run stopped early (" + to_string(r.stop_reason) + ")");
        if (r.snapshots.size() != ext.runs.front().snapshots.size())
            throw Error("viscosity_extend: snapshot sets differ between truncation levels");
    }

    const std::size_t ns = ext.runs.front().snapshots.size();
    const std::size_t nl = ext.runs.size();
    for (std::size_t s = 0; s < ns; ++s) {
        Field lim = ext.runs.front().snapshots[s];
        for (std::size_t l = 1; l < nl; ++l) {
            const auto& lo = ext.runs[l - 1].snapshots[s].values;
            const auto& hi = ext.runs[l].snapshots[s].values;
            for (std::size_t n = 0; n < lim.values.size(); ++n) {
                ext.max_monotonicity_defect = std::max(ext.max_monotonicity_defect, lo[n] - hi[n]);
                lim.values[n] = std::max(lim.values[n], hi[n]);
            }
        }
        double gap = 0.0;
        const auto& a = ext.runs[nl - 1].snapshots[s].values;
        const auto& b = ext.runs[nl - 2].snapshots[s].values;
        for (std::size_t n = 0; n < a.size(); ++n) gap = std::max(gap, std::abs(a[n] - b[n]));
        ext.gap.push_back(gap);
        ext.boundary_trace.push_back({lim.time, boundary_trace_value(lim)});
        ext.limit_snapshots.push_back(std::move(lim));
    }
    if (ext.max_monotonicity_defect > opt.monotonicity_tol)
        throw Error("viscosity_extend: k-monotonicity violated by " +
                    std::to_string(ext.max_monotonicity_defect));

    ext.tol_loss = opt.tol_loss ? *opt.tol_loss : default_tol_loss(*u0.grid, cfg.p);
    const LossResult loss = boundary_loss(ext, ext.tol_loss);
    ext.loss_time = loss.loss_time;
    ext.max_trace = loss.max_trace;
    return ext;
}

Classification classify(const Field& u0, double horizon, const SolverConfig& cfg,
                        const ClassifyOptions& opt)
{
    if (!(horizon > 0.0)) throw Error("classify: horizon must be positive");
    Classification out;
    out.initial_sup = u0.max_abs();
    if (out.initial_sup == 0.0) {
        out.verdict = Verdict::Global;
        out.note = "zero data";
        return out;
    }

    SolverConfig c = cfg;
    c.t_end = horizon;
    c.snapshot_times.clear();
    c.cap_snapshot_levels.clear();
    const RunRecord r = run(u0, c);
    out.final_sup = r.final_field.max_abs();

    switch (r.stop_reason) {
    case StopReason::Instability:
        out.verdict = Verdict::Undecided;
        out.note = "instability";
        return out;
    case StopReason::Horizon:
        if (out.final_sup <= opt.decay_frac * out.initial_sup) {
            out.verdict = Verdict::Global;
        } else {
            out.verdict = Verdict::Undecided;
            out.note = "no decay and no gradient cap within the horizon";
        }
        return out;
    case StopReason::GradientCap: break;
    }

    out.T_h = r.T_h;
    const double t0 = u0.time;
    double t_ext = horizon;
    if (opt.extension_horizon) t_ext = std::min(horizon, (*r.T_h - t0) + *opt.extension_horizon);
    ExtendOptions eo = opt.extend;
    if (eo.snapshot_times.empty())
        eo.snapshot_times = split_times(t0, *r.T_h, t0 + t_ext, 20, eo.n_snapshots);
    const ExtendedRun ext = viscosity_extend(u0, t_ext, cfg, eo);
    out.loss_time = ext.loss_time;
    out.max_trace = ext.max_trace;
    out.final_sup = ext.limit_snapshots.back().max_abs();
    out.verdict = ext.loss_time ? Verdict::GBULoss : Verdict::GBUNoLoss;
    return out;
}

bool classifications_monotone(std::vector<Classification> cls)
{
    std::sort(cls.begin(), cls.end(),
              [](const Classification& a, const Classification& b) { return a.lambda < b.lambda; });
    bool seen_non_global = false;
    for (const auto& c : cls) {
        if (c.verdict == Verdict::Undecided) continue;
        const bool global = c.verdict == Verdict::Global;
        if (global && seen_non_global) return false;
        if (!global) seen_non_global = true;
    }
    return true;
}

ThresholdResult threshold_bisect(const Field& phi, double horizon, const SolverConfig& cfg,
                                 const ThresholdOptions& opt)
{
    if (!(opt.rel_tol > 0.0)) throw Error("threshold: rel_tol must be positive");
    if (!(opt.lambda_init > 0.0)) throw Error("threshold: lambda_init must be positive");
    double lo_v = std::numeric_limits<double>::infinity(), hi_v = 0.0;
    for (double v : phi.values) {
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
    }
    if (lo_v < -1e-14 || !(hi_v > 0.0)) throw Error("threshold: phi must be nonnegative and nontrivial");

    ThresholdResult res;
    auto probe = [&](double lambda) -> std::optional<bool> {
        if (res.classifications.size() >= opt.max_probes) return std::nullopt;
        Field u0 = phi;
        for (double& v : u0.values) v *= lambda;
        Classification c = classify(u0, horizon, cfg, opt.classify);
        c.lambda = lambda;
        res.classifications.push_back(c);
        if (c.verdict == Verdict::Undecided) {
            res.paused_at = c;
            return std::nullopt;
        }
        return c.verdict == Verdict::Global;
    };

    double lambda = opt.lambda_init;
    auto g = probe(lambda);
    if (!g) return res;
    double lo, hi;
    if (*g) {
        lo = lambda;
        for (;;) {
            lambda *= 2.0;
            auto r = probe(lambda);
            if (!r) return res;
            if (!*r) break;
            lo = lambda;
        }
        hi = lambda;
    } else {
        hi = lambda;
        for (;;) {
            lambda *= 0.5;
            auto r = probe(lambda);
            if (!r) return res;
            if (*r) break;
            hi = lambda;
        }
        lo = lambda;
    }
    res.lambda_lo = lo;
    res.lambda_hi = hi;
    while ((hi - lo) / lo > opt.rel_tol) {
        const double mid = 0.5 * (lo + hi);
        auto r = probe(mid);
        if (!r) {
            res.lambda_lo = lo;
            res.lambda_hi = hi;
            return res;
        }
        if (*r)
            lo = mid;
        else
            hi = mid;
        res.lambda_lo = lo;
        res.lambda_hi = hi;
    }
    res.completed = true;
    return res;
}

MonitorReport order_check(const Field& u0, const Field& v0, double horizon, const SolverConfig& cfg,
                          const ExtendOptions& opt, const ExtendedRun* u_ext)
{
    if (!u0.grid || u0.grid != v0.grid) throw Error("order_check: fields must share a grid");
    bool differs = false;
    for (std::size_t n = 0; n < u0.values.size(); ++n) {
        if (v0.values[n] < u0.values[n]) throw Error("order_check: v0 >= u0 violated");
        if (v0.values[n] > u0.values[n]) differs = true;
    }
    if (!differs) throw Error("order_check: v0 must differ from u0");

    SolverConfig c = cfg;
    c.t_end = horizon;
    c.snapshot_times.clear();
    c.cap_snapshot_levels.clear();
    if (!c.gradient_cap)
        c.gradient_cap = std::max(default_gradient_cap(u0, cfg), default_gradient_cap(v0, cfg));
    const RunRecord ru = run(u0, c);
    const RunRecord rv = run(v0, c);
    if (ru.stop_reason != StopReason::GradientCap || rv.stop_reason != StopReason::GradientCap)
        throw Error("order_check: both data must blow up within the horizon (precondition)");
    const double Tu = *ru.T_h;
    const double Tv = *rv.T_h;

    ExtendOptions eo = opt;
    if (eo.snapshot_times.empty())
        eo.snapshot_times = split_times(v0.time, Tu, v0.time + horizon, 100, eo.n_snapshots);
    const ExtendedRun ev = viscosity_extend(v0, horizon, cfg, eo);
    std::optional<ExtendedRun> own_u;
    if (!u_ext) {
        own_u = viscosity_extend(u0, horizon, cfg, eo);
        u_ext = &*own_u;
    }

    MonitorReport rep;
    rep.name = "order_check";
    rep.fitted_constants["T_h_u"] = Tu;
    rep.fitted_constants["T_h_v"] = Tv;
    rep.fitted_constants["cap"] = *c.gradient_cap;
    if (ev.loss_time) rep.fitted_constants["loss_time_v"] = *ev.loss_time;
    if (u_ext->loss_time) rep.fitted_constants["loss_time_u"] = *u_ext->loss_time;
    rep.fitted_constants["max_trace_v"] = ev.max_trace;
    rep.passed = Tv < Tu && ev.loss_time && *ev.loss_time < Tu;
    if (!ev.loss_time) rep.flags.push_back("no_loss_v");
    return rep;
}

} // namespace dhj
