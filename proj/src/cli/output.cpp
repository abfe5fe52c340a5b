#include "dhj/cli/output.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace dhj::cli {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows)
{
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw Error("csv: row width does not match the header");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ",";
            out += format_number(r[i]);
        }
        out += "\n";
    }
    return out;
}

std::string snapshot_csv(const Field& f)
{
    const Grid& g = *f.grid;
    const bool two = g.coords() == 2;
    Gradient grad;
    if (g.nx() >= 4 && (!two || g.ny() >= 4)) grad = gradient(f);
    std::vector<std::vector<double>> rows;
    rows.reserve(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Point x = g.node(n);
        const double gn = grad.empty() ? 0.0 : std::hypot(grad[n][0], grad[n][1]);
        if (two)
            rows.push_back({x[0], x[1], f.values[n], gn});
        else
            rows.push_back({x[0], f.values[n], gn});
    }
    return two ? csv_table({"x", "y", "u", "grad"}, rows) : csv_table({"x", "u", "grad"}, rows);
}

Field read_snapshot_csv(const std::string& text, std::shared_ptr<const Grid> grid, double time)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("snapshot csv: empty");
    const bool two = grid->coords() == 2;
    const std::string expect = two ? "x,y,u,grad" : "x,u,grad";
    if (line != expect) throw Error("snapshot csv: header '" + line + "' does not match the grid");
    Field f = Field::zeros(grid, time);
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (n >= f.values.size()) throw Error("snapshot csv: more rows than grid nodes");
        std::vector<double> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(std::stod(c));
        if (cols.size() != (two ? 4u : 3u)) throw Error("snapshot csv: malformed row");
        f.values[n++] = cols[two ? 2 : 1];
    }
    if (n != f.values.size()) throw Error("snapshot csv: row count does not match the grid");
    return f;
}

// ---- SVG -------------------------------------------------------------------

namespace {

std::string fmt(double v, const char* spec = "%.6g")
{
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
        }
    }
    return o;
}

std::vector<double> linear_ticks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
        t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

} // namespace

std::string emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style)
{
    if (series.empty()) throw Error("emit_plot: no series");
    auto tx = [&](double v) { return style.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return style.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        if (style.log_x && !(x > 0.0)) return false;
        if (style.log_y && !(y > 0.0)) return false;
        return true;
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    std::size_t count = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw Error("emit_plot: x and y lengths differ");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            ++count;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (count == 0) throw Error("emit_plot: no plottable points");
    if (x1 - x0 <= 0.0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 <= 0.0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    constexpr double W = 640, H = 420, L = 70, R = 20, T = 36, B = 52;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
          << escape(style.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto tick_label = [](double v, bool log) { return log ? "1e" + fmt(v, "%.3g") : fmt(v, "%.4g"); };
    for (double v : linear_ticks(x0, x1)) {
        o << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(px(v)) << "\" y2=\""
          << H - B + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(px(v)) << "\" y=\"" << H - B + 17 << "\" text-anchor=\"middle\">"
          << tick_label(v, style.log_x) << "</text>\n";
    }
    for (double v : linear_ticks(y0, y1)) {
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << L << "\" y2=\""
          << fmt(py(v)) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
          << tick_label(v, style.log_y) << "</text>\n";
    }
    if (!style.x_label.empty())
        o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
          << escape(style.x_label) << "</text>\n";
    if (!style.y_label.empty())
        o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
          << (T + H - B) / 2 << ")\">" << escape(style.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kColours[k % (sizeof kColours / sizeof *kColours)];
        if (style.points) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                o << "<circle cx=\"" << fmt(px(tx(s.x[i]))) << "\" cy=\"" << fmt(py(ty(s.y[i])))
                  << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                o << (first ? "" : " ") << fmt(px(tx(s.x[i]))) << "," << fmt(py(ty(s.y[i])));
                first = false;
            }
            o << "\"/>\n";
        }
        const double ly = T + 14 + 16 * static_cast<double>(k);
        o << "<line x1=\"" << W - R - 120 << "\" y1=\"" << ly << "\" x2=\"" << W - R - 100 << "\" y2=\"" << ly
          << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R - 95 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// ---- JSON ------------------------------------------------------------------

Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double number_from(const Json& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json to_json(const MonitorReport& r)
{
    Json j;
    j["name"] = r.name;
    j["passed"] = r.passed;
    if (r.worst_node) {
        j["worst_node"] = {{"index", r.worst_node->index},
                           {"x", {number(r.worst_node->x[0]), number(r.worst_node->x[1])}},
                           {"value", number(r.worst_node->value)}};
    } else {
        j["worst_node"] = nullptr;
    }
    Json fc = Json::object();
    for (const auto& [k, v] : r.fitted_constants) fc[k] = number(v);
    j["fitted_constants"] = fc;
    j["flags"] = r.flags;
    return j;
}

MonitorReport monitor_from_json(const Json& j)
{
    MonitorReport r;
    r.name = j.at("name").get<std::string>();
    r.passed = j.at("passed").get<bool>();
    if (!j.at("worst_node").is_null()) {
        const Json& w = j.at("worst_node");
        r.worst_node = WorstNode{w.at("index").get<std::size_t>(),
                                 {number_from(w.at("x")[0]), number_from(w.at("x")[1])},
                                 number_from(w.at("value"))};
    }
    for (const auto& [k, v] : j.at("fitted_constants").items()) r.fitted_constants[k] = number_from(v);
    r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

Json to_json(const ProfileFit& f)
{
    return Json{{"b", number(f.b)},         {"A", number(f.A)},
                {"residual", number(f.residual)}, {"window", {number(f.s_min), number(f.s_max)}},
                {"samples", f.samples}};
}

ProfileFit fit_from_json(const Json& j)
{
    ProfileFit f;
    f.b = number_from(j.at("b"));
    f.A = number_from(j.at("A"));
    f.residual = number_from(j.at("residual"));
    f.s_min = number_from(j.at("window")[0]);
    f.s_max = number_from(j.at("window")[1]);
    f.samples = j.at("samples").get<std::size_t>();
    return f;
}

Json to_json(const Constants& c)
{
    return Json{{"p", c.p}, {"beta", c.beta}, {"c_p", c.c_p}, {"d_p", c.d_p}};
}

Json to_json(const Classification& c)
{
    Json j;
    j["lambda"] = c.lambda;
    j["verdict"] = to_string(c.verdict);
    j["T_h"] = c.T_h ? Json(*c.T_h) : Json(nullptr);
    j["loss_time"] = c.loss_time ? Json(*c.loss_time) : Json(nullptr);
    j["initial_sup"] = number(c.initial_sup);
    j["final_sup"] = number(c.final_sup);
    j["max_trace"] = number(c.max_trace);
    j["note"] = c.note;
    return j;
}

Json to_json(const ThresholdResult& r)
{
    Json j;
    j["lambda_lo"] = r.lambda_lo;
    j["lambda_hi"] = r.lambda_hi;
    j["completed"] = r.completed;
    j["monotone"] = classifications_monotone(r.classifications);
    Json cls = Json::array();
    for (const auto& c : r.classifications) cls.push_back(to_json(c));
    j["classifications"] = cls;
    j["paused_at"] = r.paused_at ? to_json(*r.paused_at) : Json(nullptr);
    return j;
}

Json to_json(const RunManifest& m)
{
    Json j;
    j["schema_version"] = m.schema_version;
    j["experiment"] = m.experiment;
    j["created"] = m.created;
    j["config"] = m.config;
    j["constants"] = m.constants;
    Json mons = Json::array();
    for (const auto& r : m.monitors) mons.push_back(to_json(r));
    j["monitors"] = mons;
    Json fits = Json::object();
    for (const auto& [k, f] : m.fits) fits[k] = to_json(f);
    j["fits"] = fits;
    j["files"] = m.files;
    Json tm = Json::object();
    for (const auto& [k, v] : m.timings) tm[k] = number(v);
    j["timings"] = tm;
    j["results"] = m.results;
    return j;
}

RunManifest manifest_from_json(const Json& j)
{
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion)
        throw Error("manifest: unsupported schema_version " + std::to_string(m.schema_version));
    m.experiment = j.at("experiment").get<std::string>();
    m.created = j.at("created").get<std::string>();
    m.config = j.at("config");
    m.constants = j.at("constants");
    for (const auto& r : j.at("monitors")) m.monitors.push_back(monitor_from_json(r));
    for (const auto& [k, f] : j.at("fits").items()) m.fits[k] = fit_from_json(f);
    m.files = j.at("files").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("timings").items()) m.timings[k] = number_from(v);
    m.results = j.at("results");
    return m;
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + p.string() + "'");
}

std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path make_run_dir(const std::filesystem::path& out, const std::string& name,
                                   std::string* timestamp)
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    if (timestamp) *timestamp = buf;
    std::filesystem::create_directories(out);
    const std::string base = name + "-" + buf;
    for (int n = 0;; ++n) {
        std::filesystem::path dir = out / (n == 0 ? base : base + "-" + std::to_string(n));
        if (std::filesystem::create_directory(dir)) return dir;
    }
}

} // namespace dhj::cli
