#include "dhj/solver.hpp"

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

Field sine(std::shared_ptr<const Grid> g, double a)
{
    Field f = Field::sample(g, [&](const Point& x) { return a * std::sin(pi * x[0]); });
    f.values.front() = f.values.back() = 0.0;
    return f;
}

double max_diff(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace

TEST_CASE("gradient stencils")
{
    auto g = interval_grid(0.1);
    const Field lin = Field::sample(g, [](const Point& x) { return x[0]; });
    for (const auto& v : gradient(lin)) CHECK(std::abs(v[0] - 1.0) <= 1e-12);

    const Field quad = Field::sample(g, [](const Point& x) { return x[0] * x[0]; });
    const Gradient gq = gradient(quad);
    for (std::size_t n = 1; n + 1 < g->size(); ++n) CHECK(std::abs(gq[n][0] - 2.0 * g->node(n)[0]) <= 1e-12);
    // the 3-point one-sided stencil is exact on quadratics as well
    CHECK(std::abs(gq.front()[0]) <= 1e-12);
    CHECK(std::abs(gq.back()[0] - 2.0) <= 1e-12);

    const Constants c = constants(3.0);
    auto fine = interval_grid(1e-3);
    const Field u = Field::sample(fine, [&](const Point& x) { return U(1.0, x[0], c); });
    const Gradient gu = gradient(u);
    double err = 0.0;
    for (std::size_t n = 0; n < fine->size(); ++n) err = std::max(err, std::abs(gu[n][0] - dU(1.0, fine->node(n)[0], c)));
    CHECK(err <= 1e-5);

    auto tiny = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.5);
    CHECK_THROWS_AS(gradient(Field::zeros(tiny)), Error);
}

TEST_CASE("forward-Euler stage on three nodes")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.5);
    Field f = Field::zeros(g);
    f.values[1] = 0.1;
    SolverConfig cfg;
    cfg.p = 3.0;
    const double dt = 0.01;
    const Field s = euler_stage(f, cfg, dt);
    CHECK(s.values[1] == doctest::Approx(0.1 - 0.8 * dt).epsilon(1e-14));
    CHECK(s.values[0] == 0.0);
    CHECK(s.values[2] == 0.0);
}

TEST_CASE("truncated nonlinearity")
{
    CHECK(truncated_power(0.0, 3.0, 1.7) == 0.0);
    CHECK(truncated_power(2.0, 3.0, 1.0) == doctest::Approx(4.0));
    CHECK(truncated_power(1.0, 3.0, 2.0) == doctest::Approx(1.0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ug(-20, 20), uk(0.1, 10);
    for (int i = 0; i < 1000; ++i) {
        const double g = ug(rng), k = uk(rng);
        const double F = truncated_power(g, 3.0, k), P = std::pow(std::abs(g), 3.0);
        CHECK(F <= P * (1 + 1e-14));
        if (std::abs(g) <= k)
            CHECK(F == doctest::Approx(P).epsilon(1e-14));
        else
            CHECK(F < P);
        CHECK(truncated_power(g, 3.0, 1.5 * k) >= F);
    }
}

TEST_CASE("zero data is a fixed point")
{
    auto g = interval_grid(0.05);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    Field u = Field::zeros(g);
    for (int i = 0; i < 20; ++i) u = step(u, cfg);
    CHECK(u.max_abs() == 0.0);

    const RunRecord r = run(Field::zeros(g), cfg);
    CHECK(r.stop_reason == StopReason::Horizon);
    CHECK_FALSE(r.T_h.has_value());
    for (const auto& s : r.grad_max_series) CHECK(s.value == 0.0);
    for (const auto& s : r.ut_max_series) CHECK(s.value == 0.0);
}

TEST_CASE("small data decays, large data reaches the cap")
{
    auto g = interval_grid(1.0 / 200);
    SolverConfig cfg;
    cfg.p = 3.0;
    cfg.t_end = 1.0;
    const Field small = sine(g, 0.1);
    const RunRecord r = run(small, cfg);
    CHECK(r.stop_reason == StopReason::Horizon);
    CHECK(r.final_field.max_abs() < small.max_abs());

    const Constants c = constants(3.0);
    cfg.gradient_cap = 0.5 * c.d_p * std::pow(g->h(), -c.beta);
    cfg.t_end = 0.1;
    const RunRecord big = run(sine(g, 8.0), cfg);
    CHECK(big.stop_reason == StopReason::GradientCap);
    REQUIRE(big.T_h.has_value());
    CHECK(std::isfinite(*big.T_h));
}

TEST_CASE("run record invariants")
{
    auto g = interval_grid(1.0 / 100);
    SolverConfig cfg;
    cfg.t_end = 0.01;
    cfg.snapshot_times = {0.0025, 0.005, 0.0075};
    const RunRecord r = run(sine(g, 8.0), cfg);
    CHECK(r.stop_reason == StopReason::GradientCap);
    CHECK(r.T_h.has_value());
    for (std::size_t i = 1; i < r.grad_max_series.size(); ++i)
        CHECK(r.grad_max_series[i].t > r.grad_max_series[i - 1].t);
    for (std::size_t i = 1; i < r.ut_max_series.size(); ++i)
        CHECK(r.ut_max_series[i].t > r.ut_max_series[i - 1].t);
    REQUIRE(r.precap_index.has_value());
    CHECK(r.snapshots[*r.precap_index].time <= *r.T_h);

    const RunRecord d = run(sine(g, 0.3), cfg);
    CHECK(d.stop_reason == StopReason::Horizon);
    CHECK_FALSE(d.T_h.has_value());
    REQUIRE(d.snapshots.size() >= 3);
    CHECK(d.snapshots[0].time == doctest::Approx(0.0025));
}

TEST_CASE("determinism")
{
    auto g = interval_grid(1.0 / 50);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    const RunRecord a = run(sine(g, 2.0), cfg);
    const RunRecord b = run(sine(g, 2.0), cfg);
    CHECK(a.steps == b.steps);
    CHECK(a.final_field.values == b.final_field.values);
    REQUIRE(a.grad_max_series.size() == b.grad_max_series.size());
    for (std::size_t i = 0; i < a.grad_max_series.size(); ++i) CHECK(a.grad_max_series[i].value == b.grad_max_series[i].value);
}

TEST_CASE("Heun local error is third order")
{
    auto g = interval_grid(0.05);
    SolverConfig cfg;
    const Field u = sine(g, 0.5);
    auto defect = [&](double dt) {
        const Field one = heun_step(u, cfg, dt);
        const Field two = heun_step(heun_step(u, cfg, dt / 2), cfg, dt / 2);
        return max_diff(one, two);
    };
    const double dt = 0.25 * stable_dt(u, cfg);
    const double ratio = defect(dt) / defect(dt / 2);
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);
}

TEST_CASE("exact half-space profile is stationary")
{
    // U_1 solves -U'' = |U'|^p; impose its values at x = 1
    const Constants c = constants(3.0);
    auto g = interval_grid(1.0 / 100);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.gradient_cap = 1e6;
    cfg.boundary_values = [&](const Point& x, double) { return U(1.0, x[0], c); };
    const Field u0 = Field::sample(g, [&](const Point& x) { return U(1.0, x[0], c); });
    const RunRecord r = run(u0, cfg);
    CHECK(r.stop_reason == StopReason::Horizon);
    CHECK(max_diff(r.final_field, u0) <= 1e-5);
}

TEST_CASE("elliptic solver")
{
    auto g = interval_grid(0.05);
    SolverConfig cfg;
    const EllipticResult z = solve_elliptic(Field::zeros(g), cfg);
    CHECK(z.converged);
    CHECK(z.u.max_abs() == 0.0);
    CHECK(z.residual == 0.0);

    auto error_at = [&](double h) {
        auto gh = interval_grid(h);
        const Field f = Field::sample(gh, [&](const Point& x) {
            return pi * pi * 0.1 * std::sin(pi * x[0]) - std::pow(std::abs(0.1 * pi * std::cos(pi * x[0])), 3.0);
        });
        const EllipticResult e = solve_elliptic(f, cfg);
        REQUIRE(e.converged);
        double err = 0.0;
        for (std::size_t n = 0; n < gh->size(); ++n)
            err = std::max(err, std::abs(e.u.values[n] - 0.1 * std::sin(pi * gh->node(n)[0])));
        return err;
    };
    const double e1 = error_at(1.0 / 20), e2 = error_at(1.0 / 40);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("maximum principle and supersolution positivity")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    auto g = interval_grid(1.0 / 40);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.snapshot_times = {0.01, 0.02, 0.03, 0.04};
    for (int i = 0; i < 50; ++i) {
        const double a1 = 2 * ua(rng), a2 = ua(rng), a3 = ua(rng);
        Field u0 = Field::sample(g, [&](const Point& x) {
            const double sn = std::sin(pi * x[0]), s2 = std::sin(2 * pi * x[0]);
            return a1 * sn + a2 * sn * s2 * s2 + a3 * std::pow(sn, 4);
        });
        u0.values.front() = u0.values.back() = 0.0;
        const RunRecord r = run(u0, cfg);
        for (const auto& s : r.snapshots) {
            CHECK(s.max_abs() <= u0.max_abs() + 1e-10);
            for (double v : s.values) CHECK(v >= -1e-10);
        }
    }
}

TEST_CASE("discrete comparison and truncation monotonicity")
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    auto g = interval_grid(1.0 / 40);
    SolverConfig cfg;
    cfg.t_end = 0.02;
    cfg.snapshot_times = {0.005, 0.01, 0.015};
    cfg.cap_snapshot_levels.clear();
    for (int i = 0; i < 50; ++i) {
        const double a = ua(rng), b = 0.5 * ua(rng), c2 = ua(rng);
        Field u0 = Field::sample(g, [&](const Point& x) {
            return a * std::sin(pi * x[0]) + b * std::sin(3 * pi * x[0]) * std::sin(pi * x[0]);
        });
        u0.values.front() = u0.values.back() = 0.0;
        Field v0 = u0;
        for (std::size_t n = 1; n + 1 < g->size(); ++n) v0.values[n] += c2 * std::sin(pi * g->node(n)[0]) * ua(rng);
        const RunRecord ru = run(u0, cfg), rv = run(v0, cfg);
        REQUIRE(ru.snapshots.size() == rv.snapshots.size());
        for (std::size_t s = 0; s < ru.snapshots.size(); ++s)
            for (std::size_t n = 0; n < g->size(); ++n)
                CHECK(ru.snapshots[s].values[n] <= rv.snapshots[s].values[n] + 1e-8);
    }

    cfg.t_end = 0.005;
    cfg.snapshot_times = {0.001, 0.002, 0.003, 0.004};
    cfg.cfl_level = 10.0;
    const Field big = sine(g, 3.0);
    const RunRecord lo = truncated_run(big, 5.0, cfg), hi = truncated_run(big, 10.0, cfg);
    CHECK(lo.stop_reason == StopReason::Horizon);
    REQUIRE(lo.snapshots.size() == hi.snapshots.size());
    for (std::size_t s = 0; s < lo.snapshots.size(); ++s)
        for (std::size_t n = 0; n < g->size(); ++n) CHECK(lo.snapshots[s].values[n] <= hi.snapshots[s].values[n] + 1e-8);
}

TEST_CASE("parabolic manufactured solution is second order in space")
{
    // u* = e^-t 0.2 sin(pi x) with the matching source
    const double p = 3.0;
    auto err_at = [&](double h) {
        auto g = interval_grid(h);
        SolverConfig cfg;
        cfg.p = p;
        cfg.t_end = 0.1;
        cfg.source = [&](const Point& x, double t) {
            const double e = std::exp(-t);
            const double u = 0.2 * e * std::sin(pi * x[0]);
            const double ux = 0.2 * e * pi * std::cos(pi * x[0]);
            return -u + pi * pi * u - std::pow(std::abs(ux), p);
        };
        const RunRecord r = run(sine(g, 0.2), cfg);
        double err = 0.0;
        for (std::size_t n = 0; n < g->size(); ++n)
            err = std::max(err, std::abs(r.final_field.values[n] - 0.2 * std::exp(-r.final_field.time) *
                                                                  std::sin(pi * g->node(n)[0])));
        return err;
    };
    const double ratio = err_at(1.0 / 20) / err_at(1.0 / 40);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("two-dimensional and radial runs")
{
    auto rect = std::make_shared<const Grid>(DomainSpec::rectangle(2, 1), 0.05);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    const Field u0 = Field::sample(rect, [](const Point& x) {
        return 0.1 * std::sin(pi * x[0] / 2) * std::sin(pi * x[1]);
    });
    const RunRecord r = run(u0, cfg);
    CHECK(r.stop_reason == StopReason::Horizon);
    CHECK(r.final_field.max_abs() < u0.max_abs());

    auto disk = std::make_shared<const Grid>(DomainSpec::disk(1), 0.025);
    const double j0 = 2.404825557695773;
    Field d0 = Field::sample(disk, [&](const Point& x) { return 0.1 * std::cyl_bessel_j(0.0, j0 * x[0]); });
    d0.values.back() = 0.0;
    const RunRecord rd = run(d0, cfg);
    CHECK(rd.stop_reason == StopReason::Horizon);
    CHECK(rd.final_field.max_abs() < d0.max_abs());
    // small data: the first radial heat mode decays like exp(-j0^2 t)
    CHECK(rd.final_field.values[0] / d0.values[0] ==
          doctest::Approx(std::exp(-j0 * j0 * rd.final_field.time)).epsilon(0.01));
}
