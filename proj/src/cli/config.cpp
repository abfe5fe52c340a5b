#include "dhj/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace dhj::cli {

namespace {

struct DomainDraft
{
    std::string shape = "interval";
    std::optional<double> length, length_x, length_y, radius;
};

using Setter = std::function<void(ExperimentConfig&, DomainDraft&, const std::string& key,
                                  const std::string& value)>;

struct Entry
{
    KeyInfo info;
    Setter set;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& expected, const std::string& got)
{
    throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + got + "'");
}

double as_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        bad(key, "a number", v);
    }
    if (pos != v.size() || !std::isfinite(d)) bad(key, "a finite number", v);
    return d;
}

double as_positive(const std::string& key, const std::string& v)
{
    const double d = as_double(key, v);
    if (!(d > 0.0)) bad(key, "a positive number", v);
    return d;
}

std::size_t as_count(const std::string& key, const std::string& v)
{
    const double d = as_double(key, v);
    if (d < 0.0 || d != std::floor(d) || d > 1e15) bad(key, "a nonnegative integer", v);
    return static_cast<std::size_t>(d);
}

bool as_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "true or false", v);
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> as_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(as_double(key, s));
    if (out.empty()) bad(key, "a comma-separated list of numbers", v);
    return out;
}

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        auto add = [&](std::string key, std::string type, std::string def, std::string desc, Setter s) {
            t.push_back({{std::move(key), std::move(type), std::move(def), std::move(desc)}, std::move(s)});
        };
        using C = ExperimentConfig;
        using D = DomainDraft;
        using S = const std::string&;

        add("run.name", "string", "run", "prefix of the run directory",
            [](C& c, D&, S, S v) { c.name = v; });

        add("domain.shape", "interval|rectangle|disk", "interval", "domain type",
            [](C&, D& d, S k, S v) {
                if (v != "interval" && v != "rectangle" && v != "disk") bad(k, "interval, rectangle or disk", v);
                d.shape = v;
            });
        add("domain.length", "number > 0", "1", "interval length",
            [](C&, D& d, S k, S v) { d.length = as_positive(k, v); });
        add("domain.length_x", "number > 0", "-", "rectangle side along x",
            [](C&, D& d, S k, S v) { d.length_x = as_positive(k, v); });
        add("domain.length_y", "number > 0", "-", "rectangle side along y",
            [](C&, D& d, S k, S v) { d.length_y = as_positive(k, v); });
        add("domain.radius", "number > 0", "-", "disk radius",
            [](C&, D& d, S k, S v) { d.radius = as_positive(k, v); });
        add("grid.h", "number > 0", "0.005", "requested node spacing (snapped down)",
            [](C& c, D&, S k, S v) { c.h = as_positive(k, v); });
        add("model.p", "number > 2", "3", "gradient exponent",
            [](C& c, D&, S k, S v) {
                const double p = as_double(k, v);
                if (!(p > 2.0)) bad(k, "p > 2", v);
                c.solver.p = p;
            });

        add("initial.kind", "zero|sine|face_bump", "sine", "initial data family",
            [](C& c, D&, S k, S v) {
                if (v == "zero") c.initial.kind = InitialKind::Zero;
                else if (v == "sine") c.initial.kind = InitialKind::Sine;
                else if (v == "face_bump") c.initial.kind = InitialKind::FaceBump;
                else bad(k, "zero, sine or face_bump", v);
            });
        add("initial.amplitude", "number", "1", "amplitude of the initial data",
            [](C& c, D&, S k, S v) { c.initial.amplitude = as_double(k, v); });
        add("initial.width", "number > 0", "0.25", "face_bump concentration width",
            [](C& c, D&, S k, S v) { c.initial.width = as_positive(k, v); });

        add("solver.t_end", "number > 0", "1", "time horizon of `solve`",
            [](C& c, D&, S k, S v) { c.solver.t_end = as_positive(k, v); });
        add("solver.cfl_diffusion", "number in (0,1]", "0.5", "diffusive CFL safety factor",
            [](C& c, D&, S k, S v) { c.solver.cfl_diffusion = as_positive(k, v); });
        add("solver.cfl_advection", "number in (0,1]", "0.5", "gradient CFL safety factor",
            [](C& c, D&, S k, S v) { c.solver.cfl_advection = as_positive(k, v); });
        add("solver.snapshot_times", "list", "-", "snapshot times",
            [](C& c, D&, S k, S v) { c.solver.snapshot_times = as_list(k, v); });
        add("solver.gradient_cap", "number > 0", "auto",
            "GBU threshold on the boundary-adjacent gradient; auto = max(0.5 d_p h^-beta, cap_data_factor max|grad u0|)",
            [](C& c, D&, S k, S v) { c.solver.gradient_cap = as_positive(k, v); });
        add("solver.cap_data_factor", "number > 0", "2", "data factor of the automatic cap",
            [](C& c, D&, S k, S v) { c.solver.cap_data_factor = as_positive(k, v); });
        add("solver.cap_snapshot_levels", "list", "0.5,0.7,0.8,0.9,0.95",
            "extra snapshots at these fractions of the cap",
            [](C& c, D&, S k, S v) { c.solver.cap_snapshot_levels = as_list(k, v); });
        add("solver.truncation_level", "number > 0", "-", "run `solve` with F_k instead of |.|^p",
            [](C& c, D&, S k, S v) { c.solver.truncation_level = as_positive(k, v); });
        add("solver.max_steps", "integer", "500000000", "step budget",
            [](C& c, D&, S k, S v) { c.solver.max_steps = as_count(k, v); });

        add("elliptic.forcing", "zero|mms", "zero", "forcing of `elliptic`; mms manufactures u* = A sin(pi x / l)",
            [](C& c, D&, S k, S v) {
                if (v != "zero" && v != "mms") bad(k, "zero or mms", v);
                c.elliptic_forcing = v;
            });
        add("elliptic.amplitude", "number", "0.1", "amplitude A of the manufactured solution",
            [](C& c, D&, S k, S v) { c.elliptic_amplitude = as_double(k, v); });
        add("elliptic.tol", "number > 0", "1e-10", "residual tolerance",
            [](C& c, D&, S k, S v) { c.solver.elliptic_tol = as_positive(k, v); });
        add("elliptic.max_steps", "integer", "50000000", "pseudo-time step budget",
            [](C& c, D&, S k, S v) { c.solver.elliptic_max_steps = as_count(k, v); });
        add("elliptic.max_time", "number > 0", "1e4", "pseudo-time budget",
            [](C& c, D&, S k, S v) { c.solver.elliptic_max_time = as_positive(k, v); });

        add("continuation.horizon", "number > 0", "1", "horizon of `continue`",
            [](C& c, D&, S k, S v) { c.horizon = as_positive(k, v); });
        add("continuation.k_schedule", "list", "auto", "explicit truncation levels (strictly increasing)",
            [](C& c, D&, S k, S v) { c.extend.k_schedule = as_list(k, v); });
        add("continuation.k0_factor", "number > 0", "2", "k0 = factor * max|grad u0|",
            [](C& c, D&, S k, S v) { c.extend.k0_factor = as_positive(k, v); });
        add("continuation.k_levels", "integer >= 3", "5", "number of doubling levels",
            [](C& c, D&, S k, S v) { c.extend.k_levels = as_count(k, v); });
        add("continuation.n_snapshots", "integer", "200", "snapshots of the extension",
            [](C& c, D&, S k, S v) { c.extend.n_snapshots = as_count(k, v); });
        add("continuation.tol_loss", "number > 0", "auto", "loss threshold; auto = 10 h^(1-beta) c_p",
            [](C& c, D&, S k, S v) { c.extend.tol_loss = as_positive(k, v); });
        add("continuation.monotonicity_tol", "number > 0", "1e-6", "allowed k-monotonicity defect before failing",
            [](C& c, D&, S k, S v) { c.extend.monotonicity_tol = as_positive(k, v); });
        add("continuation.shared_time_grid", "bool", "true", "step all truncation levels on the top level's time grid",
            [](C& c, D&, S k, S v) { c.extend.shared_time_grid = as_bool(k, v); });
        add("continuation.parallel", "bool", "true", "run truncation levels concurrently",
            [](C& c, D&, S k, S v) { c.extend.parallel = as_bool(k, v); });
        add("continuation.decay_frac", "number in (0,1)", "0.5", "decay required for a Global verdict",
            [](C& c, D&, S k, S v) { c.classify.decay_frac = as_positive(k, v); });
        add("continuation.extension_horizon", "number > 0", "-",
            "extension length after T_h when classifying (unset: to the horizon)",
            [](C& c, D&, S k, S v) { c.classify.extension_horizon = as_positive(k, v); });

        add("threshold.lambda_init", "number > 0", "1", "first probe",
            [](C& c, D&, S k, S v) { c.threshold.lambda_init = as_positive(k, v); });
        add("threshold.rel_tol", "number > 0", "0.01", "stop when (hi - lo)/lo <= rel_tol",
            [](C& c, D&, S k, S v) { c.threshold.rel_tol = as_positive(k, v); });
        add("threshold.horizon", "number > 0", "2", "classification horizon",
            [](C& c, D&, S k, S v) { c.threshold_horizon = as_positive(k, v); });
        add("threshold.max_probes", "integer", "60", "probe budget",
            [](C& c, D&, S k, S v) { c.threshold.max_probes = as_count(k, v); });

        add("monitor.eps", "number", "0.25", "Bernstein/tangential epsilon",
            [](C& c, D&, S k, S v) { c.monitor.eps = as_double(k, v); });
        add("monitor.budget", "number >= 0", "auto", "Bernstein budget for C*; auto = 5 max|grad u0|",
            [](C& c, D&, S k, S v) {
                const double b = as_double(k, v);
                if (b < 0.0) bad(k, "a nonnegative number", v);
                c.monitor.budget = b;
            });
        add("monitor.activity_threshold", "number > 0", "0.5", "singular-region gate theta_a",
            [](C& c, D&, S k, S v) { c.monitor.activity_threshold = as_positive(k, v); });
        add("monitor.dominance_tol", "number > 0", "0.25", "median tolerance of the ODE-dominance monitor",
            [](C& c, D&, S k, S v) { c.monitor.dominance_tol = as_positive(k, v); });

        add("profile.run_dir", "path", "-", "completed `solve` run directory for `profile`",
            [](C& c, D&, S, S v) { c.profile_run_dir = v; });

        add("barrier.p_values", "list", "2.5,3,4", "exponents swept by `barrier-check`",
            [](C& c, D&, S k, S v) {
                c.barrier.p_values = as_list(k, v);
                for (double p : c.barrier.p_values)
                    if (!(p > 2.0)) bad(k, "exponents p > 2", v);
            });
        add("barrier.k_fraction", "number in (0,1)", "0.5", "k = k_fraction * d_p",
            [](C& c, D&, S k, S v) { c.barrier.k_fraction = as_positive(k, v); });
        add("barrier.rho", "number > 0", "0.1", "barrier scale",
            [](C& c, D&, S k, S v) { c.barrier.rho = as_positive(k, v); });
        add("barrier.tau", "number > 0", "1", "time span t1 - t0",
            [](C& c, D&, S k, S v) { c.barrier.tau = as_positive(k, v); });
        add("barrier.L", "number >= 0", "0", "curvature bound",
            [](C& c, D&, S k, S v) { c.barrier.L = as_double(k, v); });
        add("barrier.c1", "number > 0", "1", "constant of the ODE comparison coefficient",
            [](C& c, D&, S k, S v) { c.barrier.c1 = as_positive(k, v); });
        add("barrier.c_values", "list", "1e-1,...,1e-12", "eta-recipe constants tried in order",
            [](C& c, D&, S k, S v) { c.barrier.c_values = as_list(k, v); });
        add("barrier.nx", "integer", "200", "sweep points in x",
            [](C& c, D&, S k, S v) { c.barrier.nx = as_count(k, v); });
        add("barrier.nt", "integer", "200", "sweep points in t",
            [](C& c, D&, S k, S v) { c.barrier.nt = as_count(k, v); });

        add("sweep.experiment", "name", "solve", "experiment run for each value (solve, elliptic, continue)",
            [](C& c, D&, S k, S v) {
                if (v != "solve" && v != "elliptic" && v != "continue")
                    throw ConfigError("config key '" + std::string(k) +
                                      "': expected solve, elliptic or continue, got '" + std::string(v) + "'");
                c.sweep.experiment = v;
            });
        add("sweep.parameter", "key", "-", "config key varied by `sweep`",
            [](C& c, D&, S, S v) { c.sweep.parameter = v; });
        add("sweep.values", "list", "-", "values substituted for sweep.parameter",
            [](C& c, D&, S, S v) { c.sweep.values = split_list(v); });
        add("sweep.workers", "integer", "0", "concurrent runs (0: hardware threads)",
            [](C& c, D&, S k, S v) { c.sweep.workers = as_count(k, v); });
        return t;
    }();
    return table;
}

const Entry* find_entry(const std::string& key)
{
    for (const auto& e : entries())
        if (e.info.key == key) return &e;
    return nullptr;
}

} // namespace

const std::vector<KeyInfo>& config_schema()
{
    static const std::vector<KeyInfo> keys = [] {
        std::vector<KeyInfo> k;
        for (const auto& e : entries()) k.push_back(e.info);
        return k;
    }();
    return keys;
}

ExperimentConfig parse_config(const std::map<std::string, std::string>& kv)
{
    ExperimentConfig cfg;
    DomainDraft draft;
    for (const auto& [key, value] : kv) {
        const Entry* e = find_entry(key);
        if (!e) throw ConfigError("unknown config key '" + key + "'");
        e->set(cfg, draft, key, value);
    }
    cfg.given = kv;
    // classification and threshold probes use the same continuation settings
    cfg.classify.extend = cfg.extend;
    cfg.threshold.classify = cfg.classify;

    if (draft.shape == "interval") {
        if (draft.length_x || draft.length_y || draft.radius)
            throw ConfigError("config key 'domain.shape': interval takes only domain.length");
        cfg.domain = DomainSpec::interval(draft.length.value_or(1.0));
    } else if (draft.shape == "rectangle") {
        if (!draft.length_x || !draft.length_y)
            throw ConfigError("config key 'domain.length_x'/'domain.length_y': required for a rectangle");
        if (draft.length || draft.radius)
            throw ConfigError("config key 'domain.shape': rectangle takes domain.length_x and domain.length_y");
        cfg.domain = DomainSpec::rectangle(*draft.length_x, *draft.length_y);
    } else {
        if (!draft.radius) throw ConfigError("config key 'domain.radius': required for a disk");
        if (draft.length || draft.length_x || draft.length_y)
            throw ConfigError("config key 'domain.shape': disk takes only domain.radius");
        cfg.domain = DomainSpec::disk(*draft.radius);
    }

    try {
        cfg.solver.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("solver settings: ") + e.what());
    }
    if (cfg.classify.decay_frac >= 1.0)
        throw ConfigError("config key 'continuation.decay_frac': expected a number in (0,1)");
    if (cfg.barrier.k_fraction >= 1.0)
        throw ConfigError("config key 'barrier.k_fraction': expected a number in (0,1)");
    if (cfg.barrier.L < 0.0) throw ConfigError("config key 'barrier.L': expected a nonnegative number");
    if (!cfg.sweep.parameter.empty()) {
        if (cfg.sweep.parameter.rfind("sweep.", 0) == 0)
            throw ConfigError("config key 'sweep.parameter': cannot sweep a sweep.* key");
        if (!find_entry(cfg.sweep.parameter))
            throw ConfigError("config key 'sweep.parameter': unknown key '" + cfg.sweep.parameter + "'");
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'section.key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (value.empty()) throw ConfigError("config key '" + key + "': empty value");
        if (!kv.emplace(key, value).second) throw ConfigError("config key '" + key + "': given twice");
    }
    return parse_config(kv);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const std::map<std::string, std::string>& kv)
{
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

Field initial_field(const ExperimentConfig& cfg, std::shared_ptr<const Grid> grid)
{
    const double pi = std::acos(-1.0);
    const DomainSpec& d = grid->domain();
    const double A = cfg.initial.amplitude;
    const double w = cfg.initial.width;
    std::function<double(const Point&)> fn;
    switch (cfg.initial.kind) {
    case InitialKind::Zero: fn = [](const Point&) { return 0.0; }; break;
    case InitialKind::Sine:
        switch (d.shape()) {
        case Shape::Interval:
            fn = [&](const Point& x) { return A * std::sin(pi * x[0] / d.length_x()); };
            break;
        case Shape::Rectangle:
            fn = [&](const Point& x) {
                return A * std::sin(pi * x[0] / d.length_x()) * std::sin(pi * x[1] / d.length_y());
            };
            break;
        case Shape::Disk:
            fn = [&](const Point& x) { return A * std::cos(0.5 * pi * x[0] / d.radius()); };
            break;
        }
        break;
    case InitialKind::FaceBump:
        switch (d.shape()) {
        case Shape::Interval:
            fn = [&](const Point& x) {
                return A * std::sin(pi * x[0] / d.length_x()) * std::exp(-x[0] * x[0] / (w * w));
            };
            break;
        case Shape::Rectangle:
            // concentrated at the midpoint of the face y = 0
            fn = [&](const Point& x) {
                const double dx = x[0] - 0.5 * d.length_x();
                return A * std::sin(pi * x[0] / d.length_x()) * std::sin(pi * x[1] / d.length_y()) *
                       std::exp(-(dx * dx + x[1] * x[1]) / (w * w));
            };
            break;
        case Shape::Disk:
            fn = [&](const Point& x) {
                const double r = d.radius() - x[0];
                return A * std::cos(0.5 * pi * x[0] / d.radius()) * std::exp(-r * r / (w * w));
            };
            break;
        }
        break;
    }
    Field f = Field::sample(std::move(grid), fn);
    for (std::size_t n = 0; n < f.values.size(); ++n)
        if (f.grid->is_boundary(n)) f.values[n] = 0.0;
    return f;
}

} // namespace dhj::cli
