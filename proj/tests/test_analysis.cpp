#include "dhj/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dhj;

namespace {

const double pi = std::acos(-1.0);

std::shared_ptr<const Grid> interval_grid(double h)
{
    return std::make_shared<const Grid>(DomainSpec::interval(1.0), h);
}

// U(alpha, delta(x)) on the interval
Field profile_field(std::shared_ptr<const Grid> g, double alpha, const Constants& c, double scale = 1.0)
{
    return Field::sample(g, [&](const Point& x) {
        return scale * U(alpha, distance(g->domain(), x), c);
    });
}

} // namespace

TEST_CASE("bernstein monitor")
{
    const Constants c = constants(3.0);
    auto g = interval_grid(1e-3);
    const Field exact = profile_field(g, 0.0, c);
    const MonitorReport r = bernstein_monitor(exact, 0.0, c);
    CHECK(r.passed);
    CHECK(r.fitted_constants.at("C") <= 1e-9);

    const MonitorReport over = bernstein_monitor(profile_field(g, 0.0, c, 1.2), 0.1, c);
    CHECK_FALSE(over.passed);
    REQUIRE(over.worst_node.has_value());
    CHECK(distance(g->domain(), over.worst_node->x) <= 1.5 * g->h());

    // pass/fail is monotone in the amplitude
    const double eps = 0.1;
    bool failed = false;
    for (double s : {0.8, 1.0, 1.05, 1.0 + 2 * eps, 1.5, 2.0}) {
        const bool pass = bernstein_monitor(profile_field(g, 0.0, c, s), eps, c).passed;
        if (failed) CHECK_FALSE(pass);
        failed = failed || !pass;
    }
    CHECK(failed);
    CHECK_FALSE(bernstein_monitor(profile_field(g, 0.0, c, 1.0 + 2 * eps), eps, c).passed);

    const MonitorReport z = bernstein_monitor(Field::zeros(g), 0.25, c);
    CHECK(z.passed);
    CHECK(z.fitted_constants.at("C") == 0.0);
}

TEST_CASE("profile fits")
{
    const Constants c = constants(3.0);
    std::vector<ProfileSample> s;
    for (int i = 1; i <= 10; ++i) s.push_back({0.01 * i, c.d_p * std::pow(0.01 * i, -0.5)});
    const ProfileFit f = fit_profile(s);
    CHECK(std::abs(f.b - 0.5) <= 1e-10);
    CHECK(std::abs(f.A - 0.70710678118654752) <= 1e-10);
    CHECK(f.residual <= 1e-12);
    CHECK(f.s_min == doctest::Approx(0.01));
    CHECK(f.s_max == doctest::Approx(0.1));

    std::vector<ProfileSample> flat;
    for (int i = 1; i <= 6; ++i) flat.push_back({0.1 * i, 2.0});
    const ProfileFit ff = fit_profile(flat);
    CHECK(std::abs(ff.b) <= 1e-12);
    CHECK(ff.A == doctest::Approx(2.0));

    // exact power laws are recovered in any window
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ub(0.1, 3), uA(0.1, 10), us(1e-4, 1);
    for (int t = 0; t < 50; ++t) {
        const double b = ub(rng), A = uA(rng), s0 = us(rng);
        std::vector<ProfileSample> pw;
        for (int i = 0; i < 7; ++i) pw.push_back({s0 * (1 + i), A * std::pow(s0 * (1 + i), -b)});
        const ProfileFit pf = fit_profile(pw);
        CHECK(std::abs(pf.b - b) <= 1e-10);
        CHECK(std::abs(pf.A / A - 1) <= 1e-10);
    }

    // profile flattening below the boundary-slope scale
    std::vector<ProfileSample> st;
    for (int i = 0; i <= 20; ++i) {
        const double x = 0.001 + 0.009 * i / 20.0;
        st.push_back({x, std::pow(std::pow(10.0, -2.0) + 2.0 * x, -0.5)});
    }
    CHECK(fit_profile(st).b < 0.5 - 0.05);

    CHECK_THROWS_AS(fit_profile({{0.1, 1}, {0.2, 1}, {0.3, 1}, {0.4, 1}}), Error);
    CHECK_THROWS_AS(fit_profile({{0.1, 1}, {0.2, 1}, {0.3, -1}, {0.4, 1}, {0.5, 1}}), Error);
}

TEST_CASE("normal profile extraction from the exact profile")
{
    const Constants c = constants(3.0);
    auto g = interval_grid(1e-3);
    const Field u = profile_field(g, 0.0, c);
    const Point a = {0.0, 0.0};
    const auto [lo, hi] = default_profile_window(*g);
    CHECK(lo == doctest::Approx(8e-3));
    CHECK(hi == doctest::Approx(0.1));
    const ProfileFit f = fit_profile(normal_profile(u, a, lo, hi));
    CHECK(f.b == doctest::Approx(c.beta).epsilon(0.01));
    CHECK(f.A == doctest::Approx(c.d_p).epsilon(0.01));
}

TEST_CASE("ODE dominance")
{
    const Constants c = constants(3.0);
    auto g = interval_grid(1e-3);
    const Field u = profile_field(g, 0.0, c);
    const MonitorReport r = ode_dominance(u, u, c);
    CHECK(r.passed);
    CHECK(r.fitted_constants.at("median") <= 1e-3);

    for (double alpha : {0.05, 0.3}) {
        const Field ua = profile_field(g, alpha, c);
        const MonitorReport ra = ode_dominance(ua, ua, c, {0.0, 0.25});
        CHECK(ra.fitted_constants.at("median") <= 1e-3);
    }

    auto coarse = interval_grid(1.0 / 16);
    const Field lin = Field::sample(coarse, [](const Point& x) { return x[0]; });
    // only nodes with delta >= 0.125 pass the gate; there r = 0
    const MonitorReport rl = ode_dominance(lin, lin, c, {0.5, 0.25});
    CHECK_FALSE(rl.has_flag("inactive"));
    CHECK(rl.fitted_constants.at("active_nodes") <= 13);
    CHECK(rl.fitted_constants.at("median") == doctest::Approx(1.0));

    const MonitorReport z = ode_dominance(Field::zeros(g), Field::zeros(g), c);
    CHECK(z.has_flag("inactive"));
}

TEST_CASE("tangential monitor")
{
    const Constants c = constants(3.0);
    auto g = std::make_shared<const Grid>(DomainSpec::rectangle(1, 1), 0.02);
    const Field flat = Field::sample(g, [&](const Point& x) { return U(0.1, x[1], c); });
    TangentialOptions bottom;
    bottom.face = g->face(g->index(25, 0));
    bottom.max_distance = 0.2;
    const MonitorReport r = tangential_monitor(flat, 0.25, c, bottom);
    CHECK(r.fitted_constants.at("C_eps") <= 1e-8);

    const Field xy = Field::sample(g, [](const Point& x) { return x[0] * x[1]; });
    const MonitorReport rx = tangential_monitor(xy, 0.0, c, bottom);
    CHECK(rx.fitted_constants.at("C_eps") == doctest::Approx(1.0).epsilon(0.25));

    CHECK(tangential_monitor(Field::zeros(g), 0.25, c).fitted_constants.at("C_eps") == 0.0);
    CHECK_THROWS_AS(tangential_monitor(Field::zeros(interval_grid(0.1)), 0.25, c), Error);
}

TEST_CASE("u_t and normal lower-bound monitors")
{
    auto g = interval_grid(1.0 / 100);
    SolverConfig cfg;
    cfg.t_end = 0.2;
    const RunRecord zero = run(Field::zeros(g), cfg);
    CHECK(ut_monitor(zero, 0.0, 0.2).fitted_constants.at("M") == 0.0);
    CHECK(normal_lowerbound(zero).passed);
    CHECK_THROWS_AS(ut_monitor(zero, 0.5, 0.6), Error);

    Field s0 = Field::sample(g, [](const Point& x) { return 0.1 * std::sin(pi * x[0]); });
    s0.values.back() = 0.0;
    const RunRecord decay = run(s0, cfg);
    const MonitorReport ut = ut_monitor(decay, 0.05, 0.2);
    CHECK(ut.fitted_constants.at("argmax_t") == doctest::Approx(0.05).epsilon(0.02));
    const MonitorReport nl = normal_lowerbound(decay);
    CHECK(nl.passed);
    CHECK(nl.fitted_constants.at("min_u_nu") >= -1e-8);

    Field neg = s0;
    for (double& v : neg.values) v = -v;
    cfg.snapshot_times = {0.0, 0.05, 0.1, 0.15};
    const RunRecord rn = run(neg, cfg);
    const MonitorReport nn = normal_lowerbound(rn);
    CHECK(nn.fitted_constants.at("first_min_u_nu") == doctest::Approx(-0.1 * pi).epsilon(0.01));
    CHECK(nn.fitted_constants.at("min_u_nu") >= nn.fitted_constants.at("first_min_u_nu") - 0.05);
    CHECK(nn.passed);
}

TEST_CASE("u_t stays bounded while the gradient grows")
{
    auto g = interval_grid(1.0 / 400);
    SolverConfig cfg;
    cfg.t_end = 1.0;
    Field u0 = Field::sample(g, [](const Point& x) { return 1.2 * std::sin(pi * x[0]); });
    u0.values.back() = 0.0;
    const RunRecord r = run(u0, cfg);
    REQUIRE(r.T_h.has_value());
    const double Th = *r.T_h;
    double gmax = 0.0;
    for (const auto& s : r.grad_max_series) gmax = std::max(gmax, s.value);
    const MonitorReport m = ut_monitor(r, Th / 2, Th);
    CHECK(std::isfinite(m.fitted_constants.at("M")));
    CHECK(m.fitted_constants.at("M") <= 0.1 * std::pow(gmax, 3.0));
}

TEST_CASE("tangential anisotropy")
{
    const Constants c = constants(3.0);
    auto g = std::make_shared<const Grid>(DomainSpec::rectangle(2, 1), 0.02);
    const Point a{1.0, 0.0};
    const double gslope = 0.7;
    const Field lin = Field::sample(g, [&](const Point& x) { return gslope * x[1] * (1 - x[1]); });
    const auto s = tangential_anisotropy(lin, a, c, 0.02, 0.5);
    REQUIRE(s.size() >= 5);
    for (const auto& v : s) CHECK(v.value == doctest::Approx(gslope * std::pow(v.r, c.beta)).epsilon(0.02));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].r >= s[i - 1].r);

    // u_nu = [C r^(2(p-1)/(p-2))]^-beta at the face: r^beta u_nu grows as r -> 0
    const double C = 3.0;
    const Field sing = Field::sample(g, [&](const Point& x) {
        const double r = std::max(std::abs(x[0] - 1.0), 1e-3);
        return x[1] * std::pow(C * std::pow(r, 4.0), -c.beta);
    });
    const auto ss = tangential_anisotropy(sing, a, c, 0.02, 0.5);
    REQUIRE(ss.size() >= 5);
    for (std::size_t i = 1; i < ss.size(); ++i)
        if (ss[i].r > ss[i - 1].r + 1e-12) CHECK(ss[i].value < ss[i - 1].value);

    for (const auto& v : tangential_anisotropy(Field::zeros(g), a, c)) CHECK(v.value == 0.0);
    CHECK_THROWS_AS(tangential_anisotropy(Field::zeros(interval_grid(0.1)), {0, 0}, c), Error);
}

TEST_CASE("space-time sandwich on the exact profile")
{
    const Constants c = constants(3.0);
    auto g = interval_grid(1e-3);
    const Field u = profile_field(g, 0.02, c);
    const SandwichResult s = sandwich_check(u, {0.0, 0.0}, 0.5, 8e-3, 0.05, c);
    CHECK(s.total > 10);
    CHECK(s.fraction() >= 0.99);
}

TEST_CASE("rescale compare")
{
    const Constants c = constants(3.0);
    auto g = interval_grid(1e-3);
    const Field u0 = profile_field(g, 0.0, c);
    // interpolation error bound h^2 max|U''| / 8 over the window
    for (double lambda : {0.1, 0.2, 0.5, 1.0}) {
        RescaleOptions o;
        o.R = lambda <= 0.2 ? 2.0 : 0.5;
        const double upp = 0.5 * c.d_p * c.beta * std::pow(lambda * o.eta, -c.beta - 1.0);
        const double bound = 2.0 * 1e-6 * upp / 8.0 * std::pow(lambda, c.beta - 1.0);
        const RescaleResult r = rescale_compare(u0, {0.0, 0.0}, lambda, c, o);
        CHECK(r.alpha <= 1e-2);
        CHECK(r.distance <= bound);
    }
    const Field u2 = profile_field(g, 2.0, c);
    const RescaleResult r2 = rescale_compare(u2, {0.0, 0.0}, 0.05, c);
    CHECK(r2.alpha == doctest::Approx(40.0).epsilon(0.01));
    CHECK(r2.distance <= 1e-4);
    for (double lambda : {0.1, 0.3, 1.0 / 6}) {
        const Field ua = profile_field(g, 0.4, c);
        RescaleOptions o;
        o.R = std::min(2.0, 0.45 / lambda);
        const RescaleResult ra = rescale_compare(ua, {0.0, 0.0}, lambda, c, o);
        CHECK(ra.alpha == doctest::Approx(0.4 / lambda).epsilon(0.01));
    }

    const RescaleResult z = rescale_compare(Field::zeros(g), {0.0, 0.0}, 0.1, c);
    CHECK(z.degenerate);
    CHECK_THROWS_AS(rescale_compare(u0, {0.0, 0.0}, 0.3, c), Error);
}

TEST_CASE("blow-up rate fits")
{
    std::vector<Sample> s1, s2;
    for (int i = 0; i <= 900; ++i) {
        const double t = 0.001 * i;
        s1.push_back({t, 1.0 / (1.0 - t)});
        s2.push_back({t, 2.0 * std::pow(1.0 - t, -2.0)});
    }
    const RateFit f1 = gbu_rate_fit(s1, 0.9);
    CHECK(f1.t_star == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f1.fit.b == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f1.fit.A == doctest::Approx(1.0).epsilon(0.02));
    const RateFit f2 = gbu_rate_fit(s2, 0.9);
    CHECK(f2.fit.b == doctest::Approx(2.0).epsilon(0.02));
    CHECK(f2.fit.A == doctest::Approx(2.0).epsilon(0.02));

    // scale equivariance
    std::vector<Sample> s3 = s1;
    for (auto& x : s3) x.value *= 7.5;
    const RateFit f3 = gbu_rate_fit(s3, 0.9);
    CHECK(f3.t_star == doctest::Approx(f1.t_star).epsilon(1e-6));
    CHECK(f3.fit.b == doctest::Approx(f1.fit.b).epsilon(1e-6));
    CHECK(f3.fit.A == doctest::Approx(7.5 * f1.fit.A).epsilon(1e-6));

    std::vector<Sample> flat;
    for (int i = 0; i < 50; ++i) flat.push_back({0.01 * i, 3.0});
    CHECK_THROWS_AS(gbu_rate_fit(flat, 1.0), Error);
}

TEST_CASE("interpolation")
{
    auto g = std::make_shared<const Grid>(DomainSpec::rectangle(1, 1), 0.1);
    const Field f = Field::sample(g, [](const Point& x) { return 2 * x[0] + 3 * x[1] + 1; });
    CHECK(interpolate(*g, f.values, {0.234, 0.777}) == doctest::Approx(2 * 0.234 + 3 * 0.777 + 1));
    auto i1 = interval_grid(0.1);
    const Field l = Field::sample(i1, [](const Point& x) { return 5 * x[0]; });
    CHECK(interpolate(*i1, l.values, {0.333, 0}) == doctest::Approx(1.665));
}
