#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "homog/errors.hpp"
#include "homog/parabolic.hpp"

using namespace homog;

namespace {

EdgeCoefficientField two_cell_a() { return make_coefficients(PeriodicGrid::with_spacing(1, 2, 1.0), {1.0, 4.0}); }

SolverConfig tight()
{
    SolverConfig s;
    s.tol = 1e-12;
    return s;
}

} // namespace

TEST_SUITE("parabolic") {

TEST_CASE("geometric schedule")
{
    for (double T : {0.1, 1.0, 16.0, 128.0, 1e4}) {
        CAPTURE(T);
        const auto s = TimeSchedule::geometric(T);
        CHECK(std::abs(s.total() - T) <= 1e-12 * T);
        CHECK(s.steps.front() == doctest::Approx(std::min(0.05, T / 200.0)));
        for (double dt : s.steps) CHECK(dt > 0.0);
        for (std::size_t n = 1; n + 1 < s.steps.size(); ++n)
            CHECK(s.steps[n] == doctest::Approx(1.1 * s.steps[n - 1]));
    }
    const double stops[] = {32.0, 8.0, 16.0};
    const auto s = TimeSchedule::geometric_with_stops(stops);
    const auto t = s.times();
    for (double stop : stops)
        CHECK(std::any_of(t.begin(), t.end(), [&](double x) { return std::abs(x - stop) <= 1e-12 * stop; }));
    CHECK(std::abs(s.total() - 32.0) <= 1e-12 * 32.0);
    CHECK_THROWS_AS(TimeSchedule::geometric(-1.0), ValidationError);
    ScheduleParams bad;
    bad.growth = 0.5;
    CHECK_THROWS_AS(TimeSchedule::geometric(1.0, bad), ValidationError);
}

TEST_CASE("constant coefficients give u = 0")
{
    const PeriodicGrid g(2, 8, 8.0);
    const auto tr = evolve(EdgeCoefficientField(g, 2.0), Direction{0.6, 0.8}, TimeSchedule::geometric(4.0));
    for (double x : tr.final_state.values) CHECK(x == 0.0);
    for (double x : tr.quadrature.values) CHECK(x == 0.0);
    for (const auto& r : tr.records) {
        CHECK(r.mean_u2 == 0.0);
        CHECK(r.mean_grad_u2 == 0.0);
    }
}

TEST_CASE("two-cell mode decays like exp(-10 t)")
{
    const auto a = two_cell_a();
    const auto ie = evolve(a, Direction{1.0}, TimeSchedule::uniform(0.1, 10), tight());
    const double exact = 3.0 * std::exp(-1.0);
    CHECK(std::abs(ie.final_state.values[1] - exact) <= 0.05 * exact);
    CHECK(std::abs(ie.final_state.values[0] + exact) <= 0.05 * exact);
    // The implicit Euler iterate is exactly (1 + 10 dt)^{-n} times the data.
    CHECK(ie.final_state.values[1] == doctest::Approx(3.0 * std::pow(1.1, -10.0)).epsilon(1e-10));

    // Crank-Nicolson is second order: halving dt quarters the error.
    double prev = 0.0;
    for (std::size_t n : {10u, 20u, 40u}) {
        const auto cn = evolve(a, Direction{1.0}, TimeSchedule::uniform(0.1, n, TimeScheme::crank_nicolson), tight());
        const double err = std::abs(cn.final_state.values[1] - exact);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("telescoping identities")
{
    testgen::Gen gen(31);
    for (auto scheme : {TimeScheme::implicit_euler, TimeScheme::crank_nicolson}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto g = gen.grid(4, 16);
            const auto a = gen.coefficients(g, 0.5, 2.0);
            ScheduleParams p;
            p.scheme = scheme;
            const auto schedule = TimeSchedule::geometric(gen.uniform(0.5, 20.0), p);
            const SolverConfig s = tight();
            const auto tr = evolve(a, gen.direction(g.dim()), schedule, s);
            const auto Aq = apply_A(a, tr.quadrature).values;
            double worst = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < Aq.size(); ++i) {
                worst = std::max(worst, std::abs(Aq[i] - (tr.initial_state.values[i] - tr.final_state.values[i])));
            }
            scale = testgen::norm2(tr.initial_state.values);
            CHECK(worst <= 10.0 * s.tol * static_cast<double>(schedule.steps.size()) * scale);
        }
    }
}

TEST_CASE("u stays mean zero; rms(u) and energy do not increase")
{
    testgen::Gen gen(32);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = gen.grid(8, 24);
        const auto a = gen.coefficients(g);
        EvolveOptions o;
        o.record_every_step = true;
        const auto tr = evolve(a, gen.direction(g.dim()), TimeSchedule::geometric(10.0), {}, o);
        const double scale = std::sqrt(tr.records.front().mean_u2);
        for (std::size_t n = 0; n < tr.records.size(); ++n) {
            CHECK(std::abs(tr.records[n].mean_u) <= 1e-12 * scale);
            if (n > 0) {
                CHECK(tr.records[n].mean_u2 <= tr.records[n - 1].mean_u2 * (1.0 + 1e-12));
                CHECK(tr.records[n].energy <= tr.records[n - 1].energy * (1.0 + 1e-9));
            }
        }
        double m = 0.0;
        for (double x : tr.quadrature.values) m += x;
        CHECK(std::abs(m) <= 1e-10 * testgen::norm2(tr.quadrature.values) * std::sqrt(double(g.size())));
    }
}

TEST_CASE("recorded times follow powers of sqrt 2 and include the end")
{
    const PeriodicGrid g(1, 32, 32.0);
    testgen::Gen gen(33);
    const auto tr = evolve(gen.coefficients(g), Direction{1.0}, TimeSchedule::geometric(64.0));
    CHECK(tr.records.front().t == 0.0);
    CHECK(tr.records.back().t == doctest::Approx(64.0));
    CHECK(tr.records.size() < 60);
    for (std::size_t n = 2; n < tr.records.size(); ++n) CHECK(tr.records[n].t > tr.records[n - 1].t);
}

TEST_CASE("snapshots must be step endpoints")
{
    const PeriodicGrid g(1, 8, 8.0);
    testgen::Gen gen(34);
    const auto a = gen.coefficients(g);
    EvolveOptions o;
    o.snapshot_times = {0.123456};
    CHECK_THROWS_AS(evolve(a, Direction{1.0}, TimeSchedule::geometric(1.0), {}, o), ValidationError);
    const double stops[] = {1.0, 2.0};
    o.snapshot_times = {1.0, 2.0};
    const auto tr = evolve(a, Direction{1.0}, TimeSchedule::geometric_with_stops(stops), {}, o);
    REQUIRE(tr.snapshots.size() == 2);
    CHECK(tr.snapshots[1].u.values == tr.final_state.values);
}

TEST_CASE("space-time regularity sum stabilizes on a fixed box")
{
    testgen::Gen gen(35);
    const PeriodicGrid g(1, 64, 64.0);
    const auto a = gen.coefficients(g, 0.5, 2.0);
    std::vector<double> sums;
    for (double T : {50.0, 200.0, 800.0, 3200.0}) {
        EvolveOptions o;
        o.record_every_step = true;
        const auto s = TimeSchedule::geometric(T);
        const auto tr = evolve(a, Direction{1.0}, s, {}, o);
        double sum = 0.0;
        for (std::size_t n = 1; n < tr.records.size(); ++n)
            sum += s.steps[n - 1] * (tr.records[n].mean_u2 + tr.records[n].mean_grad_u2);
        CHECK(std::isfinite(sum));
        sums.push_back(sum);
    }
    CHECK(std::abs(sums[3] - sums[2]) <= 1e-6 * sums[3]);
    CHECK(std::abs(sums[3] - sums[2]) <= std::abs(sums[1] - sums[0]));
}

TEST_CASE("decay diagnostics")
{
    const PeriodicGrid g(1, 16, 16.0);
    const auto flat = evolve(EdgeCoefficientField(g, 1.0), Direction{1.0}, TimeSchedule::geometric(8.0));
    const ParabolicTrace one[] = {flat};
    for (const auto& r : decay_diagnostics(one)) {
        CHECK(r.mean_u == 0.0);
        CHECK(r.rms_u == 0.0);
        CHECK(r.rms_grad_u == 0.0);
        CHECK(r.stderr_u2 == 0.0);
    }
    const auto other = evolve(EdgeCoefficientField(g, 1.0), Direction{1.0}, TimeSchedule::geometric(4.0));
    const ParabolicTrace mixed[] = {flat, other};
    CHECK_THROWS_AS(decay_diagnostics(mixed), ValidationError);
    CHECK_THROWS_AS(decay_diagnostics(std::span<const ParabolicTrace>{}), ValidationError);

    testgen::Gen gen(36);
    std::vector<ParabolicTrace> traces;
    for (int i = 0; i < 5; ++i)
        traces.push_back(evolve(gen.coefficients(g), Direction{1.0}, TimeSchedule::geometric(8.0)));
    const auto rows = decay_diagnostics(traces);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double m = 0.0;
        for (const auto& tr : traces) m += tr.records[j].mean_u2;
        CHECK(rows[j].rms_u == doctest::Approx(std::sqrt(m / 5.0)));
        if (j > 0) CHECK(rows[j].rms_u <= rows[j - 1].rms_u * (1.0 + 1e-12));
    }
}

} // TEST_SUITE
