#include "dhj/continuation.hpp"

#include <doctest.h>

#include <cmath>

using namespace dhj;

namespace {

const double pi = std::acos(-1.0);

Field sine(std::shared_ptr<const Grid> g, double a)
{
    Field f = Field::sample(g, [&](const Point& x) { return a * std::sin(pi * x[0]); });
    f.values.front() = f.values.back() = 0.0;
    return f;
}

} // namespace

TEST_CASE("verdict names round trip")
{
    for (Verdict v : {Verdict::Global, Verdict::GBUNoLoss, Verdict::GBULoss, Verdict::Undecided})
        CHECK(verdict_from_string(to_string(v)) == v);
    CHECK(to_string(Verdict::GBULoss) == "GBU-loss");
    CHECK_THROWS_AS(verdict_from_string("maybe"), Error);
}

TEST_CASE("default loss tolerance")
{
    const Grid g(DomainSpec::interval(1.0), 0.01);
    CHECK(default_tol_loss(g, 3.0) == doctest::Approx(10.0 * std::sqrt(0.01) * std::sqrt(2.0)));
}

TEST_CASE("extension of zero and small data")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.02);
    SolverConfig cfg;
    ExtendOptions opt;
    opt.n_snapshots = 20;
    const ExtendedRun z = viscosity_extend(Field::zeros(g), 0.1, cfg, opt);
    for (const auto& f : z.limit_snapshots) CHECK(f.max_abs() == 0.0);
    CHECK_FALSE(z.loss_time.has_value());

    const Field u0 = sine(g, 0.1);
    const ExtendedRun e = viscosity_extend(u0, 0.1, cfg, opt);
    CHECK(e.k_schedule.size() == 5);
    for (std::size_t i = 1; i < e.k_schedule.size(); ++i) CHECK(e.k_schedule[i] == doctest::Approx(2 * e.k_schedule[i - 1]));
    for (double gap : e.gap) CHECK(gap <= 1e-12);
    CHECK_FALSE(e.loss_time.has_value());
    for (const auto& s : e.boundary_trace) CHECK(s.value >= 0.0);

    // the limit agrees with the classical run
    SolverConfig c2 = cfg;
    c2.t_end = 0.1;
    c2.snapshot_times.clear();
    for (const auto& f : e.limit_snapshots) c2.snapshot_times.push_back(f.time);
    const RunRecord classical = run(u0, c2);
    REQUIRE(classical.snapshots.size() == e.limit_snapshots.size());
    for (std::size_t i = 0; i < classical.snapshots.size(); ++i)
        for (std::size_t n = 0; n < g->size(); ++n)
            CHECK(std::abs(classical.snapshots[i].values[n] - e.limit_snapshots[i].values[n]) <= 1e-6);

    CHECK_FALSE(boundary_loss(e, e.tol_loss).loss_time.has_value());
    CHECK_FALSE(boundary_loss(e, 1.01 * e.max_trace).loss_time.has_value());
}

TEST_CASE("extension of large data loses the boundary condition")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.01);
    SolverConfig cfg;
    ExtendOptions opt;
    opt.k_levels = 3;
    opt.n_snapshots = 40;
    const Field u0 = sine(g, 8.0);
    const ExtendedRun e = viscosity_extend(u0, 0.01, cfg, opt);
    SolverConfig rc = cfg;
    rc.t_end = 0.01;
    const RunRecord classical = run(u0, rc);
    REQUIRE(classical.T_h.has_value());
    REQUIRE(e.loss_time.has_value());
    CHECK(*e.loss_time > *classical.T_h);
    CHECK(*e.loss_time < 0.01);
    CHECK(e.max_trace > e.tol_loss);

    // limit dominates every run, runs are ordered in k
    for (std::size_t r = 0; r < e.runs.size(); ++r)
        for (std::size_t i = 0; i < e.limit_snapshots.size(); ++i)
            for (std::size_t n = 0; n < g->size(); ++n)
                CHECK(e.runs[r].snapshots[i].values[n] <= e.limit_snapshots[i].values[n] + 1e-8);
    CHECK(e.max_monotonicity_defect <= 1e-6);

    CHECK_FALSE(boundary_loss(e, 2 * e.max_trace).loss_time.has_value());
    const LossResult l = boundary_loss(e, e.tol_loss);
    REQUIRE(l.loss_time.has_value());
    CHECK(*l.loss_time == doctest::Approx(*e.loss_time));
}

TEST_CASE("classification")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.01);
    SolverConfig cfg;
    ClassifyOptions opt;
    opt.extend.k_levels = 3;
    opt.extend.n_snapshots = 40;
    CHECK(classify(Field::zeros(g), 1.0, cfg, opt).verdict == Verdict::Global);
    CHECK(classify(sine(g, 0.1), 1.0, cfg, opt).verdict == Verdict::Global);
    opt.extension_horizon = 0.01;
    const Classification big = classify(sine(g, 8.0), 1.0, cfg, opt);
    CHECK(big.verdict == Verdict::GBULoss);
    CHECK(big.T_h.has_value());
    CHECK(big.loss_time.has_value());

    // too short to decide
    const Classification u = classify(sine(g, 0.5), 1e-4, cfg, opt);
    CHECK(u.verdict == Verdict::Undecided);
}

TEST_CASE("classification tables")
{
    auto cl = [](double l, Verdict v) {
        Classification c;
        c.lambda = l;
        c.verdict = v;
        return c;
    };
    CHECK(classifications_monotone({cl(0.5, Verdict::Global), cl(2, Verdict::GBULoss), cl(1, Verdict::Global)}));
    CHECK_FALSE(classifications_monotone({cl(0.5, Verdict::GBULoss), cl(1, Verdict::Global)}));
    CHECK(classifications_monotone({}));
}

TEST_CASE("threshold bisection on a coarse grid")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.02);
    SolverConfig cfg;
    ThresholdOptions opt;
    opt.rel_tol = 0.05;
    opt.classify.extension_horizon = 0.02;
    opt.classify.extend.k_levels = 3;
    opt.classify.extend.n_snapshots = 20;
    const ThresholdResult r = threshold_bisect(sine(g, 1.0), 2.0, cfg, opt);
    REQUIRE(r.completed);
    CHECK(r.lambda_lo < r.lambda_hi);
    CHECK(r.lambda_hi / r.lambda_lo <= 1.05);
    CHECK(classifications_monotone(r.classifications));
    for (const auto& c : r.classifications) {
        if (c.lambda <= r.lambda_lo) CHECK(c.verdict == Verdict::Global);
        if (c.lambda >= r.lambda_hi) CHECK(c.verdict != Verdict::Global);
    }
}

TEST_CASE("order check preconditions")
{
    auto g = std::make_shared<const Grid>(DomainSpec::interval(1.0), 0.02);
    SolverConfig cfg;
    ExtendOptions opt;
    opt.k_levels = 3;
    opt.n_snapshots = 20;
    const Field u0 = sine(g, 8.0);
    CHECK_THROWS_AS(order_check(u0, u0, 0.01, cfg, opt), Error);
    CHECK_THROWS_AS(order_check(sine(g, 0.1), sine(g, 0.12), 0.5, cfg, opt), Error);
}
