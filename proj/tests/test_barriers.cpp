#include "dhj/barriers.hpp"

#include <doctest.h>

#include <cmath>

using namespace dhj;

namespace {

BarrierParams raw(double p, double k, double eta, double c1 = 1.0)
{
    BarrierParams bp;
    bp.p = p;
    bp.k = k;
    bp.eta = eta;
    bp.c1 = c1;
    return bp;
}

std::vector<double> c_grid()
{
    std::vector<double> c;
    for (int e = 1; e <= 12; ++e) c.push_back(std::pow(10.0, -e));
    return c;
}

} // namespace

TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(BarrierParams::make(3, 0.35, 0.01, 0.1, 1));
    CHECK_THROWS_AS(BarrierParams::make(3, 0.8, 0.01, 0.1, 1), Error);
    CHECK_THROWS_AS(BarrierParams::make(3, 0.35, 1.5, 0.1, 1), Error);
    CHECK_THROWS_AS(BarrierParams::make(3, 0.35, 0.01, -0.1, 1), Error);
    const BarrierParams bp = BarrierParams::make(4, 0.3, 0.01, 0.1, 1);
    CHECK(std::abs(bp.kappa * (1 - constants(4).beta) - bp.k) <= 1e-12);
}

TEST_CASE("ODE comparison coefficient")
{
    CHECK(lemma71_coefficient(raw(3, 0.3, 0.01)) == doctest::Approx(-0.11273).epsilon(1e-9));
    for (double p : {2.5, 3.0, 4.0, 5.0}) {
        const Constants c = constants(p);
        CHECK(std::abs(lemma71_coefficient(raw(p, c.d_p, 0.0))) <= 1e-12);
        CHECK(lemma71_coefficient(raw(p, 0.9 * c.d_p, 0.0)) < 0.0);
        CHECK(lemma71_coefficient(raw(p, 0.3 * c.d_p, 0.0)) < 0.0);
    }
}

TEST_CASE("smooth cutoff")
{
    CHECK(ramp(0.0) == 0.0);
    CHECK(ramp(1.0) == 1.0);
    CHECK(ramp(0.5) == doctest::Approx(0.5));
    for (double R : {0.5, 1.0, 3.0}) {
        const CutoffValue in = cutoff({0.2 * R, 0.1 * R}, R, 0.5);
        CHECK(in.theta == 1.0);
        CHECK(in.grad[0] == 0.0);
        CHECK(in.grad[1] == 0.0);
        CHECK(cutoff({R, 0.0}, R, 0.5).theta == 0.0);
        CHECK(cutoff({0.9 * R, 0.9 * R}, R, 0.5).theta == 0.0);
    }
    for (double p : {2.5, 3.0, 4.0}) {
        const double m = (p + 1) / (2 * p);
        std::size_t fails = 0;
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j)
                if (!cutoff({-1.0 + (i + 0.5) / 50.0, -1.0 + (j + 0.5) / 50.0}, 1.0, m).bound_check) ++fails;
        CHECK(fails == 0);
        CHECK(std::isfinite(cutoff_constant(m)));
    }
}

TEST_CASE("barrier residual")
{
    const BarrierParams bp = BarrierParams::make(3, 0.35, 1e-4, 0.1, 1);
    CHECK_THROWS_AS(lemma72_residual(bp, 0.0, 0.5), Error);
    CHECK_THROWS_AS(lemma72_residual(bp, 0.05, 1.5), Error);

    // early times in the cutoff core: kappa delta^(-beta p) (1-beta)(beta - k^(p-1))
    const Constants c = constants(3);
    const double x = 0.05, t = 1e-9;
    const double expected = bp.kappa * std::pow(x, -c.beta * 3) * (1 - c.beta) * (c.beta - bp.k * bp.k);
    CHECK(lemma72_residual(bp, x, t) == doctest::Approx(expected).epsilon(1e-3));
    CHECK(expected > 0.0);
}

TEST_CASE("barrier residual sweep finds a feasible eta")
{
    for (double p : {2.5, 3.0, 4.0}) {
        const Constants c = constants(p);
        const double k = p == 3.0 ? 0.35 : 0.5 * c.d_p;
        const BarrierParams bp = BarrierParams::make(p, k, 0.01, 0.1, 1.0);
        const BarrierSweep s = lemma72_search(bp, c_grid(), 1e-6, 200, 200);
        CHECK(s.feasible);
        CHECK(s.min_residual >= -1e-6);
        CHECK(s.eta == doctest::Approx(eta_recipe(s.c, 0.1, 1.0, p)));
    }
    // the L > 0 penalty keeps a feasible region at small c
    const BarrierParams bl = BarrierParams::make(3, 0.35, 0.01, 0.1, 1.0, 1.0);
    CHECK(lemma72_search(bl, c_grid(), 1e-6, 100, 100).feasible);
}

TEST_CASE("barrier flux bound")
{
    BarrierParams bp = BarrierParams::make(3, 0.35, 0.01, 0.1, 1);
    const FluxBound f = lemma72_flux(bp, 0.05, 0.5);
    CHECK(f.value == doctest::Approx(9.99848988597778).epsilon(1e-12));
    CHECK(f.exponents_ok);
    for (double p : {2.5, 3.0, 4.0, 5.0}) {
        const Constants c = constants(p);
        const FluxBound q = lemma72_flux(BarrierParams::make(p, 0.5 * c.d_p, 0.01, 0.1, 1), 0.05, 0.5);
        CHECK(std::abs(q.time_exponent - 1 / (p - 2)) <= 1e-14);
        CHECK(std::abs(q.rho_exponent + 1 / (p - 1)) <= 1e-14);
    }
    CHECK_THROWS_AS(lemma72_flux(bp, 0.05, 0.0), Error);
}

TEST_CASE("interior gradient bracket")
{
    CHECK(lemma73_bracket(2, 8, 1, 1, 3) == doctest::Approx(6.0));
    const double base = lemma73_bracket(1e-30, 1e-30, 1.0, 0.5, 3);
    CHECK(base == doctest::Approx(1.0 + std::pow(0.5, -0.25)).epsilon(1e-5));
    const double a = lemma73_bracket(1, 1, 1, 1, 3), b = lemma73_bracket(1, 1, 0.5, 1, 3);
    CHECK(b - a == doctest::Approx(std::pow(2.0, 0.5) - 1.0));
    CHECK_THROWS_AS(lemma73_bracket(0, 1, 1, 1, 3), Error);
}

TEST_CASE("interior gradient cross-check")
{
    const Lemma73Check c = lemma73_crosscheck(3.0, {0.5, 1.0, 2.0}, {0.01, 0.02, 0.04});
    CHECK(c.cases.size() == 9);
    CHECK(c.C_fit > 0.0);
    CHECK(c.max_violation == 0.0);
}
