#include "dhj/cli/experiments.hpp"

#include "dhj/analysis.hpp"
#include "dhj/barriers.hpp"
#include "dhj/continuation.hpp"
#include "dhj/profiles.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace dhj::cli {

namespace fs = std::filesystem;

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"solve",   "elliptic", "continue", "threshold",
                                                "profile", "barrier-check", "sweep"};
    return names;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stage
{
public:
    Stage(RunManifest& m, std::string name)
        : m_(m), name_(std::move(name)), t0_(std::chrono::steady_clock::now())
    {
    }

    template <class F>
    auto operator()(F&& fn) -> decltype(fn())
    {
        struct Record
        {
            Stage& s;
            ~Record()
            {
                const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - s.t0_;
                s.m_.timings[s.name_] += dt.count();
            }
        } rec{*this};
        try {
            return fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw Error("stage '" + name_ + "': " + e.what());
        }
    }

private:
    RunManifest& m_;
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

Json opt_number(const std::optional<double>& v)
{
    return v ? number(*v) : Json(nullptr);
}

Json config_echo(const ExperimentConfig& cfg)
{
    Json j = Json::object();
    for (const auto& [k, v] : cfg.given) j[k] = v;
    return j;
}

struct Context
{
    const ExperimentConfig& cfg;
    fs::path dir;
    RunManifest& m;

    void file(const std::string& name, const std::string& text)
    {
        write_text(dir / name, text);
        m.files.push_back(name);
    }

    bool all_passed() const
    {
        for (const auto& r : m.monitors)
            if (!r.passed) return false;
        return true;
    }
};

std::shared_ptr<const Grid> make_grid(const ExperimentConfig& cfg)
{
    return std::make_shared<const Grid>(cfg.domain, cfg.h);
}

PlotSeries series_of(const std::string& label, const std::vector<Sample>& s)
{
    PlotSeries out{label, {}, {}};
    for (const auto& x : s) {
        out.x.push_back(x.t);
        out.y.push_back(x.value);
    }
    return out;
}

std::string samples_csv(const std::string& name, const std::vector<Sample>& s)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(s.size());
    for (const auto& x : s) rows.push_back({x.t, x.value});
    return csv_table({"t", name}, rows);
}

double max_gradient(const Field& f)
{
    double g = 0.0;
    for (const auto& v : gradient(f)) g = std::max(g, std::hypot(v[0], v[1]));
    return g;
}

// ---- solve -----------------------------------------------------------------

void do_solve(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    const Constants k = constants(cfg.solver.p);
    auto grid = Stage(cx.m, "grid")([&] { return make_grid(cfg); });
    const Field u0 = Stage(cx.m, "initial")([&] { return initial_field(cfg, grid); });
    const RunRecord rec = Stage(cx.m, "solver")([&] { return run(u0, cfg.solver); });

    cx.m.constants = to_json(k);
    cx.m.constants["h"] = grid->h();
    cx.m.constants["gradient_cap"] = number(rec.gradient_cap);

    const Field& last = rec.precap_index ? rec.snapshots[*rec.precap_index] : rec.final_field;
    Stage(cx.m, "monitors")([&] {
        BernsteinOptions bo;
        bo.budget = cfg.monitor.budget.value_or(5.0 * max_gradient(u0));
        cx.m.monitors.push_back(bernstein_monitor(last, cfg.monitor.eps, k, bo));
        cx.m.monitors.push_back(normal_lowerbound(rec));
        if (rec.precap_index && *rec.precap_index > 0) {
            DominanceOptions d{cfg.monitor.activity_threshold, cfg.monitor.dominance_tol};
            cx.m.monitors.push_back(ode_dominance(last, rec.snapshots[*rec.precap_index - 1], k, d));
        }
    });

    Json res;
    res["stop_reason"] = to_string(rec.stop_reason);
    res["T_h"] = opt_number(rec.T_h);
    res["steps"] = rec.steps;
    res["final_time"] = rec.final_field.time;
    res["initial_sup"] = u0.max_abs();
    res["final_sup"] = rec.final_field.max_abs();
    res["initial_max_gradient"] = max_gradient(u0);
    res["snapshots"] = rec.snapshots.size();
    if (rec.stop_reason == StopReason::GradientCap) {
        try {
            const RateFit rf = gbu_rate_fit(rec, k);
            res["rate_fit"] = to_json(rf.fit);
            res["rate_fit"]["t_star"] = rf.t_star;
            cx.m.fits["gbu_rate"] = rf.fit;
        } catch (const std::exception& e) {
            res["rate_fit"] = Json{{"error", e.what()}};
        }
    }
    cx.m.results = res;

    Stage(cx.m, "write")([&] {
        cx.file("snapshot_final.csv", snapshot_csv(rec.final_field));
        if (rec.precap_index) cx.file("snapshot_precap.csv", snapshot_csv(last));
        cx.file("grad_series.csv", samples_csv("grad_max", rec.grad_max_series));
        cx.file("ut_series.csv", samples_csv("ut_max", rec.ut_max_series));
        PlotStyle st{"max |grad u| against time", "t", "max |grad u|", false, false, false};
        bool positive = !rec.grad_max_series.empty();
        for (const auto& s : rec.grad_max_series) positive = positive && s.value > 0.0;
        st.log_y = positive;
        cx.file("grad_norm.svg", emit_plot({series_of("numeric", rec.grad_max_series)}, st));
    });
}

// ---- elliptic --------------------------------------------------------------

void do_elliptic(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    auto grid = make_grid(cfg);
    const bool mms = cfg.elliptic_forcing == "mms";
    const double A = cfg.elliptic_amplitude;
    const double p = cfg.solver.p;
    const Field forcing = Field::sample(grid, [&](const Point& x) {
        return mms ? mms_forcing(cfg.domain, A, p, x) : 0.0;
    });
    const EllipticResult er = Stage(cx.m, "elliptic")([&] { return solve_elliptic(forcing, cfg.solver); });

    double err = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t n = 0; n < grid->size(); ++n) {
        const Point x = grid->node(n);
        const double exact = mms ? mms_solution(cfg.domain, A, x) : 0.0;
        err = std::max(err, std::abs(er.u.values[n] - exact));
        if (grid->coords() == 2)
            rows.push_back({x[0], x[1], er.u.values[n], exact});
        else
            rows.push_back({x[0], er.u.values[n], exact});
    }

    cx.m.constants = to_json(constants(p));
    cx.m.constants["h"] = grid->h();
    MonitorReport conv;
    conv.name = "elliptic_convergence";
    conv.passed = er.converged;
    conv.fitted_constants["residual"] = er.residual;
    conv.fitted_constants["error_inf"] = err;
    if (!er.converged) conv.flags.push_back("not_converged");
    cx.m.monitors.push_back(conv);
    cx.m.results = Json{{"forcing", cfg.elliptic_forcing},
                        {"converged", er.converged},
                        {"residual", number(er.residual)},
                        {"steps", er.steps},
                        {"pseudo_time", er.pseudo_time},
                        {"error_inf", mms ? number(err) : Json(nullptr)}};

    Stage(cx.m, "write")([&] {
        cx.file("solution.csv", grid->coords() == 2 ? csv_table({"x", "y", "u", "exact"}, rows)
                                                    : csv_table({"x", "u", "exact"}, rows));
        if (grid->coords() == 1) {
            PlotSeries num{"numeric", {}, {}}, ex{"oracle", {}, {}};
            for (const auto& r : rows) {
                num.x.push_back(r[0]);
                num.y.push_back(r[1]);
                ex.x.push_back(r[0]);
                ex.y.push_back(r[2]);
            }
            cx.file("solution.svg", emit_plot({num, ex}, {"steady state", "x", "u"}));
        }
    });
}

// ---- continue --------------------------------------------------------------

void do_continue(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    auto grid = make_grid(cfg);
    const Field u0 = initial_field(cfg, grid);
    const ExtendedRun ext =
        Stage(cx.m, "continuation")([&] { return viscosity_extend(u0, cfg.horizon, cfg.solver, cfg.extend); });

    cx.m.constants = to_json(constants(cfg.solver.p));
    cx.m.constants["h"] = grid->h();
    cx.m.constants["tol_loss"] = ext.tol_loss;

    MonitorReport mono;
    mono.name = "k_monotone";
    mono.passed = ext.max_monotonicity_defect <= cfg.extend.monotonicity_tol;
    mono.fitted_constants["max_defect"] = ext.max_monotonicity_defect;
    mono.fitted_constants["final_gap"] = ext.gap.empty() ? 0.0 : ext.gap.back();
    cx.m.monitors.push_back(mono);

    // T_h of the untruncated problem under the same solver settings
    const RunRecord plain = Stage(cx.m, "solver")([&] {
        SolverConfig sc = cfg.solver;
        sc.t_end = cfg.horizon;
        return run(u0, sc);
    });

    Json runs = Json::array();
    for (std::size_t i = 0; i < ext.runs.size(); ++i)
        runs.push_back(Json{{"k", ext.k_schedule[i]},
                            {"steps", ext.runs[i].steps},
                            {"stop_reason", to_string(ext.runs[i].stop_reason)}});
    Verdict v = Verdict::Global;
    if (plain.T_h) v = ext.loss_time ? Verdict::GBULoss : Verdict::GBUNoLoss;
    cx.m.results = Json{{"T_h", opt_number(plain.T_h)},
                        {"loss_time", opt_number(ext.loss_time)},
                        {"max_trace", ext.max_trace},
                        {"tol_loss", ext.tol_loss},
                        {"verdict", to_string(v)},
                        {"runs", runs}};

    Stage(cx.m, "write")([&] {
        cx.file("trace.csv", samples_csv("trace", ext.boundary_trace));
        std::vector<Sample> gap;
        for (std::size_t i = 0; i < ext.gap.size(); ++i) gap.push_back({ext.limit_snapshots[i].time, ext.gap[i]});
        cx.file("gap.csv", samples_csv("gap", gap));
        if (!ext.limit_snapshots.empty()) cx.file("limit_final.csv", snapshot_csv(ext.limit_snapshots.back()));
        PlotSeries tol{"10 tol_loss", {}, {}};
        if (!ext.boundary_trace.empty()) {
            tol.x = {ext.boundary_trace.front().t, ext.boundary_trace.back().t};
            tol.y = {10.0 * ext.tol_loss, 10.0 * ext.tol_loss};
        }
        cx.file("boundary_trace.svg",
                emit_plot({series_of("trace", ext.boundary_trace), tol}, {"boundary trace", "t", "trace"}));
    });
}

// ---- threshold -------------------------------------------------------------

void do_threshold(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    auto grid = make_grid(cfg);
    const Field phi = initial_field(cfg, grid);
    const ThresholdResult tr = Stage(cx.m, "threshold")(
        [&] { return threshold_bisect(phi, cfg.threshold_horizon, cfg.solver, cfg.threshold); });

    cx.m.constants = to_json(constants(cfg.solver.p));
    cx.m.constants["h"] = grid->h();
    MonitorReport mono;
    mono.name = "threshold_monotone";
    mono.passed = tr.completed && classifications_monotone(tr.classifications);
    if (!tr.completed) mono.flags.push_back("paused");
    mono.fitted_constants["lambda_lo"] = tr.lambda_lo;
    mono.fitted_constants["lambda_hi"] = tr.lambda_hi;
    cx.m.monitors.push_back(mono);
    cx.m.results = to_json(tr);

    Stage(cx.m, "write")([&] {
        std::vector<Classification> cls = tr.classifications;
        std::sort(cls.begin(), cls.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
        std::vector<std::vector<double>> rows;
        PlotSeries ratio{"final_sup / initial_sup", {}, {}};
        for (const auto& c : cls) {
            rows.push_back({c.lambda, static_cast<double>(static_cast<int>(c.verdict)), c.T_h.value_or(kNaN),
                            c.loss_time.value_or(kNaN), c.initial_sup, c.final_sup, c.max_trace});
            ratio.x.push_back(c.lambda);
            ratio.y.push_back(c.initial_sup > 0.0 ? c.final_sup / c.initial_sup : kNaN);
        }
        cx.file("classifications.csv",
                csv_table({"lambda", "verdict", "T_h", "loss_time", "initial_sup", "final_sup", "max_trace"}, rows));
        PlotStyle st{"threshold probes", "lambda", "sup ratio"};
        st.points = true;
        cx.file("threshold.svg", emit_plot({ratio}, st));
    });
}

// ---- profile ---------------------------------------------------------------

void do_profile(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    ExperimentConfig src = cfg;
    Field f;
    Stage(cx.m, "load")([&] {
        fs::path dir = cfg.profile_run_dir;
        if (dir.empty()) {
            // no run given: solve here first
            do_solve(cx);
            dir = cx.dir;
        } else {
            const RunManifest prior = manifest_from_json(Json::parse(read_text(dir / "manifest.json")));
            if (prior.experiment != "solve")
                throw Error("profile.run_dir holds a '" + prior.experiment + "' run, expected 'solve'");
            std::map<std::string, std::string> kv;
            for (const auto& [k, v] : prior.config.items()) kv[k] = v.get<std::string>();
            src = parse_config(kv);
        }
        const fs::path snap =
            fs::exists(dir / "snapshot_precap.csv") ? dir / "snapshot_precap.csv" : dir / "snapshot_final.csv";
        f = read_snapshot_csv(read_text(snap), make_grid(src), 0.0);
    });

    const Constants k = constants(src.solver.p);
    const Point a = gbu_point(f);
    const auto [s_min, s_max] = default_profile_window(*f.grid);
    const auto samples = normal_profile(f, a, s_min, s_max);
    const ProfileFit fit = Stage(cx.m, "fit")([&] { return fit_profile(samples); });

    cx.m.constants = to_json(k);
    cx.m.constants["h"] = f.grid->h();
    cx.m.fits["normal_profile"] = fit;
    MonitorReport rep;
    rep.name = "profile_fit";
    rep.fitted_constants["b"] = fit.b;
    rep.fitted_constants["A"] = fit.A;
    rep.fitted_constants["b_minus_beta"] = fit.b - k.beta;
    rep.fitted_constants["A_over_d_p"] = fit.A / k.d_p;
    rep.passed = std::abs(fit.b - k.beta) <= 0.08 && std::abs(fit.A / k.d_p - 1.0) <= 0.15;
    cx.m.monitors.push_back(rep);
    Json res = cx.m.results.is_object() ? cx.m.results : Json::object();
    res["gbu_point"] = {a[0], a[1]};
    res["window"] = {s_min, s_max};
    res["boundary_slope"] = boundary_slope(f, a);
    cx.m.results = res;

    Stage(cx.m, "write")([&] {
        std::vector<std::vector<double>> rows;
        PlotSeries num{"numeric", {}, {}}, ora{"oracle", {}, {}}, fitted{"fit", {}, {}};
        for (const auto& s : samples) {
            const double g_fit = fit.A * std::pow(s.s, -fit.b);
            rows.push_back({s.s, s.g, g_fit});
            num.x.push_back(s.s);
            num.y.push_back(s.g);
            ora.x.push_back(s.s);
            ora.y.push_back(k.d_p * std::pow(s.s, -k.beta));
            fitted.x.push_back(s.s);
            fitted.y.push_back(g_fit);
        }
        cx.file("profile.csv", csv_table({"s", "g", "fit"}, rows));
        PlotStyle st{"normal profile", "s", "u_nu"};
        st.log_x = st.log_y = true;
        cx.file("profile.svg", emit_plot({num, ora, fitted}, st));
    });
}

// ---- barrier-check ---------------------------------------------------------

void do_barrier(Context& cx)
{
    const BarrierSettings& b = cx.cfg.barrier;
    std::vector<double> cs = b.c_values;
    if (cs.empty())
        for (int e = 1; e <= 12; ++e) cs.push_back(std::pow(10.0, -e));

    Json per_p = Json::array();
    std::vector<std::vector<double>> rows;
    cx.m.constants = Json::array();
    for (double p : b.p_values) {
        const Constants k = constants(p);
        cx.m.constants.push_back(to_json(k));
        BarrierParams bp = BarrierParams::make(p, b.k_fraction * k.d_p, eta_recipe(cs.front(), b.rho, b.tau, p),
                                               b.rho, b.tau, b.L, b.c1);
        const BarrierSweep best =
            Stage(cx.m, "lemma72")([&] { return lemma72_search(bp, cs, 1e-6, b.nx, b.nt); });
        // the coefficient at the critical amplitude, eta = 0
        BarrierParams crit;
        crit.p = p;
        crit.k = k.d_p;
        crit.eta = 0.0;
        crit.c1 = b.c1;
        const double at_dp = lemma71_coefficient(crit);
        crit.k = 0.9 * k.d_p;
        const double at_09 = lemma71_coefficient(crit);
        bp.eta = best.eta;
        const FluxBound flux = lemma72_flux(bp, best.c, 0.5 * b.tau);

        MonitorReport rep;
        rep.name = "lemma72_p" + format_number(p);
        rep.passed = best.feasible && std::abs(at_dp) <= 1e-12 && at_09 < 0.0 && flux.exponents_ok;
        rep.worst_node = WorstNode{0, {best.argmin_x, best.argmin_t}, best.min_residual};
        rep.fitted_constants["c"] = best.c;
        rep.fitted_constants["eta"] = best.eta;
        rep.fitted_constants["min_residual"] = best.min_residual;
        rep.fitted_constants["lemma71_at_d_p"] = at_dp;
        rep.fitted_constants["lemma71_at_0.9d_p"] = at_09;
        if (!best.feasible) rep.flags.push_back("infeasible");
        cx.m.monitors.push_back(rep);
        per_p.push_back(Json{{"p", p},
                             {"k", bp.k},
                             {"c", best.c},
                             {"eta", best.eta},
                             {"min_residual", best.min_residual},
                             {"argmin", {best.argmin_x, best.argmin_t}},
                             {"feasible", best.feasible},
                             {"flux", {{"value", number(flux.value)},
                                       {"wall_slope", number(flux.wall_slope)},
                                       {"time_exponent", flux.time_exponent},
                                       {"rho_exponent", flux.rho_exponent}}}});
        rows.push_back({p, best.c, best.eta, best.min_residual, best.argmin_x, best.argmin_t,
                        best.feasible ? 1.0 : 0.0});
    }

    // cutoff bound on a 100 x 100 lattice of the unit square, m = (p+1)/(2p)
    for (double p : b.p_values) {
        MonitorReport cut;
        cut.name = "cutoff_p" + format_number(p);
        Stage(cx.m, "cutoff")([&] {
            const double m = (p + 1.0) / (2.0 * p);
            std::size_t failed = 0;
            for (int i = 0; i < 100; ++i)
                for (int j = 0; j < 100; ++j) {
                    const Point x{-1.0 + (i + 0.5) / 50.0, -1.0 + (j + 0.5) / 50.0};
                    if (!cutoff(x, 1.0, m, 2).bound_check) ++failed;
                }
            cut.passed = failed == 0;
            cut.fitted_constants["m"] = m;
            cut.fitted_constants["C_m"] = cutoff_constant(m, 2);
            cut.fitted_constants["failures"] = static_cast<double>(failed);
        });
        cx.m.monitors.push_back(cut);
    }

    cx.m.results = Json{{"c_values", cs}, {"per_p", per_p}};
    Stage(cx.m, "write")([&] {
        cx.file("barrier_sweep.csv",
                csv_table({"p", "c", "eta", "min_residual", "argmin_x", "argmin_t", "feasible"}, rows));
    });
}

// ---- sweep -----------------------------------------------------------------

void dispatch(const std::string& name, Context& cx);

void do_sweep(Context& cx)
{
    const ExperimentConfig& cfg = cx.cfg;
    if (cfg.sweep.parameter.empty() || cfg.sweep.values.empty())
        throw ConfigError("config key 'sweep.parameter': sweep needs sweep.parameter and sweep.values");
    const std::size_t n = cfg.sweep.values.size();
    std::vector<ExperimentConfig> cfgs;
    for (const auto& v : cfg.sweep.values) {
        auto kv = cfg.given;
        kv[cfg.sweep.parameter] = v;
        cfgs.push_back(parse_config(kv));
    }

    std::vector<ExperimentResult> results(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            const fs::path sub = cx.dir / ("run-" + std::to_string(i));
            try {
                fs::create_directory(sub);
                results[i] = run_experiment_in(cfg.sweep.experiment, cfgs[i], sub);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    Stage(cx.m, "sweep")([&] {
        std::size_t w = cfg.sweep.workers ? cfg.sweep.workers : std::max(1u, std::thread::hardware_concurrency());
        w = std::min(w, n);
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < w; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    });

    Json table = Json::array();
    MonitorReport rep;
    rep.name = "sweep";
    for (std::size_t i = 0; i < n; ++i) {
        Json row{{"value", cfg.sweep.values[i]}, {"dir", "run-" + std::to_string(i)}};
        if (!errors[i].empty()) {
            row["error"] = errors[i];
            rep.passed = false;
            rep.flags.push_back("error:run-" + std::to_string(i));
        } else {
            row["passed"] = results[i].passed;
            row["results"] = results[i].manifest.results;
            rep.passed = rep.passed && results[i].passed;
            cx.m.files.push_back("run-" + std::to_string(i) + "/manifest.json");
        }
        table.push_back(row);
    }
    cx.m.monitors.push_back(rep);
    cx.m.results = Json{{"experiment", cfg.sweep.experiment}, {"parameter", cfg.sweep.parameter}, {"runs", table}};
}

void dispatch(const std::string& name, Context& cx)
{
    if (name == "solve")
        do_solve(cx);
    else if (name == "elliptic")
        do_elliptic(cx);
    else if (name == "continue")
        do_continue(cx);
    else if (name == "threshold")
        do_threshold(cx);
    else if (name == "profile")
        do_profile(cx);
    else if (name == "barrier-check")
        do_barrier(cx);
    else if (name == "sweep")
        do_sweep(cx);
    else
        throw ConfigError("unknown experiment '" + name + "'");
}

} // namespace

ExperimentResult run_experiment_in(const std::string& name, const ExperimentConfig& cfg, const fs::path& dir)
{
    ExperimentResult out;
    out.dir = dir;
    RunManifest& m = out.manifest;
    m.experiment = name;
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&tt, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        m.created = buf;
    }
    m.config = config_echo(cfg);
    Context cx{cfg, dir, m};
    dispatch(name, cx);
    out.passed = cx.all_passed();
    for (const auto& f : m.files)
        if (!fs::exists(dir / f)) throw Error("manifest references missing file '" + f + "'");
    write_text(dir / "manifest.json", to_json(m).dump(2) + "\n");
    return out;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg, const fs::path& out)
{
    bool known = false;
    for (const auto& n : experiment_names()) known = known || n == name;
    if (!known) throw ConfigError("unknown experiment '" + name + "'");
    return run_experiment_in(name, cfg, make_run_dir(out, cfg.name));
}

Json stable_view(const RunManifest& m)
{
    Json j = to_json(m);
    j.erase("created");
    j.erase("timings");
    return j;
}

double mms_solution(const DomainSpec& d, double A, const Point& x)
{
    const double pi = std::acos(-1.0);
    switch (d.shape()) {
    case Shape::Interval: return A * std::sin(pi * x[0] / d.length_x());
    case Shape::Rectangle: return A * std::sin(pi * x[0] / d.length_x()) * std::sin(pi * x[1] / d.length_y());
    case Shape::Disk: return A * std::cos(0.5 * pi * x[0] / d.radius());
    }
    return 0.0;
}

double mms_forcing(const DomainSpec& d, double A, double p, const Point& x)
{
    const double pi = std::acos(-1.0);
    switch (d.shape()) {
    case Shape::Interval: {
        const double k = pi / d.length_x();
        return A * k * k * std::sin(k * x[0]) - abs_pow(A * k * std::cos(k * x[0]), p);
    }
    case Shape::Rectangle: {
        const double kx = pi / d.length_x(), ky = pi / d.length_y();
        const double sx = std::sin(kx * x[0]), cx = std::cos(kx * x[0]);
        const double sy = std::sin(ky * x[1]), cy = std::cos(ky * x[1]);
        const double g = std::hypot(A * kx * cx * sy, A * ky * sx * cy);
        return A * (kx * kx + ky * ky) * sx * sy - abs_pow(g, p);
    }
    case Shape::Disk: {
        const double k = 0.5 * pi / d.radius();
        const double r = x[0];
        const double n = d.space_dim();
        const double ur = -A * k * std::sin(k * r);
        const double urr = -A * k * k * std::cos(k * r);
        const double lap = r > 0.0 ? urr + (n - 1.0) * ur / r : n * urr;
        return -lap - abs_pow(ur, p);
    }
    }
    return 0.0;
}

} // namespace dhj::cli
