#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "homog/errors.hpp"
#include "homog/parallel.hpp"
#include "homog/upscale.hpp"

using namespace homog;

namespace {

EdgeCoefficientField two_cell_a() { return make_coefficients(PeriodicGrid::with_spacing(1, 2, 1.0), {1.0, 4.0}); }

FieldLaw lognormal(double l) { return FieldLaw::lognormal(0.0, {CovarianceKind::exponential, 1.0, l}); }

} // namespace

TEST_SUITE("upscale") {

TEST_CASE("estimate_one examples")
{
    const PeriodicGrid g(2, 8, 8.0);
    CHECK(estimate_one(EdgeCoefficientField(g, 3.5), Method::naive, Direction{0.6, 0.8}, kInfiniteTime) ==
          doctest::Approx(3.5).epsilon(1e-14));
    const auto a = two_cell_a();
    CHECK(estimate_one(a, Method::naive, Direction{1.0}, kInfiniteTime) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(estimate_one(a, Method::zeroth_order, Direction{1.0}, 1.0) == doctest::Approx(1.6074).epsilon(1e-4));
}

TEST_CASE("constant law Monte Carlo")
{
    const auto e = monte_carlo(FieldLaw::constant(2.0), PeriodicGrid(2, 8, 8.0), Method::modified,
                               Direction{1.0, 0.0}, 4.0, 7, 1);
    CHECK(e.mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.sample_variance == doctest::Approx(0.0).epsilon(1e-28));
    CHECK(e.samples == 7);
    CHECK(e.bracket_violations == 0);
}

TEST_CASE("two-phase harmonic mean law of large numbers")
{
    const auto e = monte_carlo(FieldLaw::two_phase(1.0, 4.0), PeriodicGrid(1, 8192, 8192.0), Method::naive,
                               Direction{1.0}, kInfiniteTime, 200, 5);
    CHECK(std::abs(e.mean - 1.6) <= 3.0 * e.std_error);
    CHECK(e.std_error > 0.0);
    CHECK(e.bracket_violations == 0);
}

TEST_CASE("1D lognormal continuum value")
{
    const std::size_t N = 8192;
    const auto e = monte_carlo(lognormal(4.0), PeriodicGrid(1, N, double(N)), Method::naive, Direction{1.0},
                               kInfiniteTime, 500, 6);
    CHECK(std::abs(e.mean - std::exp(-0.5)) <= 3.0 * e.std_error + 2.0 / double(N));
}

TEST_CASE("Monte Carlo is deterministic and thread-count independent")
{
    const PeriodicGrid g(2, 24, 24.0);
    const auto law = FieldLaw::logitnormal(0.0, {CovarianceKind::exponential, 1.0, 3.0}, 1.0, 5.0);
    const int saved = parallel::max_threads();
    parallel::set_threads(1);
    const auto a = monte_carlo(law, g, Method::modified, Direction{1.0, 0.0}, 4.0, 12, 99);
    parallel::set_threads(4);
    const auto b = monte_carlo(law, g, Method::modified, Direction{1.0, 0.0}, 4.0, 12, 99);
    parallel::set_threads(saved);
    CHECK(a.values == b.values);
    CHECK(a.mean == b.mean);
    CHECK(a.sample_variance == b.sample_variance);
    const auto c = monte_carlo(law, g, Method::modified, Direction{1.0, 0.0}, 4.0, 12, 100);
    CHECK(c.values != a.values);
    // Realization i is independent of M.
    const auto d = monte_carlo(law, g, Method::modified, Direction{1.0, 0.0}, 4.0, 5, 99);
    CHECK(std::equal(d.values.begin(), d.values.end(), a.values.begin()));
}

TEST_CASE("estimates lie inside the Voigt-Reuss bracket")
{
    testgen::Gen gen(51);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = gen.grid(4, 24);
        const auto a = gen.coefficients(g, 0.05, 20.0);
        const Direction xi = gen.direction(g.dim());
        const VoigtReuss b = voigt_reuss_bounds(a, xi);
        for (auto m : {Method::naive, Method::zeroth_order, Method::modified, Method::modified_quadrature}) {
            const double e = estimate_one(a, m, xi, gen.uniform(0.5, 50.0));
            CHECK(within_bracket(e, b));
        }
        if (g.dim() == 1) {
            const double e = estimate_one(a, Method::naive, xi, kInfiniteTime);
            CHECK(e == doctest::Approx(b.harmonic).epsilon(1e-9));
        }
    }
}

TEST_CASE("isotropic law gives matching diagonal estimates")
{
    const PeriodicGrid g(2, 32, 32.0);
    const auto law = lognormal(2.0);
    const auto e1 = monte_carlo(law, g, Method::naive, Direction::axis(2, 0), kInfiniteTime, 40, 3);
    const auto e2 = monte_carlo(law, g, Method::naive, Direction::axis(2, 1), kInfiniteTime, 40, 3);
    CHECK(std::abs(e1.mean - e2.mean) <= 3.0 * std::hypot(e1.std_error, e2.std_error));
}

TEST_CASE("polarization tensor")
{
    const PeriodicGrid g(2, 8, 8.0);
    const auto t = estimate_tensor(EdgeCoefficientField(g, 1.5), Method::naive, kInfiniteTime);
    CHECK(t[0] == doctest::Approx(1.5));
    CHECK(t[3] == doctest::Approx(1.5));
    CHECK(std::abs(t[1]) <= 1e-12);
    CHECK(t[1] == t[2]);
    // Layered medium: a varies along x only; the effective tensor is
    // diag(harmonic, arithmetic) with no off-diagonal part.
    std::vector<double> v(2 * g.size());
    for (std::size_t i1 = 0; i1 < 8; ++i1)
        for (std::size_t i0 = 0; i0 < 8; ++i0) {
            const double c = i0 % 2 ? 4.0 : 1.0;
            v[g.index(i0, i1)] = c;                                    // x faces
            v[g.size() + g.index(i0, i1)] = c;                          // y faces
        }
    const auto lay = estimate_tensor(make_coefficients(g, v), Method::naive, kInfiniteTime);
    CHECK(lay[0] == doctest::Approx(1.6).epsilon(1e-9));
    CHECK(lay[3] == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(std::abs(lay[1]) <= 1e-9);
    CHECK_THROWS_AS(estimate_tensor(two_cell_a(), Method::naive, kInfiniteTime), ValidationError);
}

TEST_CASE("paired systematic error: constant law is exactly zero")
{
    const double Ts[] = {2.0, 4.0, 8.0};
    const auto s = paired_systematic_error(FieldLaw::constant(1.3), PeriodicGrid(2, 8, 8.0), Direction{1.0, 0.0},
                                           Ts, 4, 1);
    for (const auto& r : s.rows) {
        CHECK(r.err_sys == 0.0);
        CHECK_FALSE(r.above_noise_floor);
    }
    CHECK(fit_above_noise_floor(s.rows).status == "all points at noise floor");
}

TEST_CASE("paired systematic error decreases with T")
{
    const double Ts[] = {2.0, 4.0, 8.0, 16.0, 32.0};
    const auto s = paired_systematic_error(lognormal(2.0), PeriodicGrid(1, 512, 512.0), Direction{1.0}, Ts, 40, 8);
    for (std::size_t j = 1; j < s.rows.size(); ++j)
        CHECK(s.rows[j].err_sys <= s.rows[j - 1].err_sys + 2.0 * s.rows[j].std_error);
    CHECK(s.rows.front().above_noise_floor);
    CHECK(s.bracket_violations == 0);
    // Quadrature variant measures the same bias to solver accuracy.
    const auto q = paired_systematic_error(lognormal(2.0), PeriodicGrid(1, 512, 512.0), Direction{1.0}, Ts, 40, 8,
                                           {}, Method::modified_quadrature);
    for (std::size_t j = 0; j < s.rows.size(); ++j)
        CHECK(q.rows[j].err_sys == doctest::Approx(s.rows[j].err_sys).epsilon(1e-5));
    CHECK_THROWS_AS(paired_systematic_error(lognormal(2.0), PeriodicGrid(1, 8, 8.0), Direction{1.0}, Ts, 2, 8, {},
                                            Method::naive),
                    ValidationError);
}

TEST_CASE("paired estimator is consistent as T grows")
{
    const double Ts[] = {1e4};
    const auto s = paired_systematic_error(lognormal(4.0), PeriodicGrid(1, 64, 64.0), Direction{1.0}, Ts, 10, 3);
    CHECK(s.rows[0].err_sys <= 1e-6);
}

TEST_CASE("fit_rate examples")
{
    const std::pair<double, double> p1[] = {{1, 1}, {2, 0.5}, {4, 0.25}};
    const auto f1 = fit_rate(p1);
    CHECK(f1.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f1.r2 == doctest::Approx(1.0).epsilon(1e-14));
    const std::pair<double, double> p2[] = {{4, 0.5}, {16, 0.25}, {64, 0.125}};
    CHECK(fit_rate(p2).slope == doctest::Approx(-0.5).epsilon(1e-14));

    testgen::Gen gen(52);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 6; ++i) {
            const double x = std::pow(2.0, 2 + i);
            pts.emplace_back(x, std::pow(x, -0.5) * (1.0 + gen.uniform(-0.05, 0.05)));
        }
        const double s = fit_rate(pts).slope;
        CHECK(s >= -0.6);
        CHECK(s <= -0.4);
    }
    const std::pair<double, double> bad[] = {{1, 1}, {2, 0.0}};
    CHECK_THROWS_AS(fit_rate(bad), ValidationError);
    const std::pair<double, double> one[] = {{1, 1}};
    CHECK_THROWS_AS(fit_rate(one), ValidationError);
}

TEST_CASE("noise-floor masking")
{
    std::vector<SystematicErrorRow> rows(4);
    for (std::size_t j = 0; j < 4; ++j) {
        rows[j].T = std::pow(2.0, double(j + 1));
        rows[j].err_sys = std::pow(rows[j].T, -0.5);
        rows[j].std_error = 0.01;
        rows[j].above_noise_floor = true;
    }
    rows[3].above_noise_floor = false;
    const auto f = fit_above_noise_floor(rows);
    CHECK(f.status == "ok");
    CHECK(f.used == std::vector<bool>{true, true, true, false});
    CHECK(f.fit->slope == doctest::Approx(-0.5));
    rows[1].above_noise_floor = rows[2].above_noise_floor = false;
    CHECK(fit_above_noise_floor(rows).status == "too few points above noise floor");
}

TEST_CASE("sweep over box sizes")
{
    const std::size_t cells[] = {64, 256};
    const double Ts[] = {2.0, 8.0, 32.0};
    const auto flat = sweep_T_vs_R(FieldLaw::constant(2.0), 1, cells, 1.0, Ts, 4, 1);
    for (const auto& r : flat.rows) {
        CHECK(r.err_sys == 0.0);
        CHECK(r.err_stat == 0.0);
    }

    const std::size_t more[] = {64, 256, 1024};
    const auto s = sweep_T_vs_R(lognormal(2.0), 1, more, 1.0, Ts, 60, 4);
    CHECK(s.rows.size() == 9);
    // err_stat shrinks with R at fixed T.
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.rows[6 + j].err_stat < s.rows[j].err_stat);
    for (std::size_t r = 1; r < s.optimal_T.size(); ++r) CHECK(s.optimal_T[r].second >= s.optimal_T[r - 1].second);
    CHECK(s.optimal_T[2].first == 1024.0);
}

TEST_CASE("decay study and fit")
{
    const auto flat = decay_study(FieldLaw::constant(1.0), PeriodicGrid(1, 32, 32.0), Direction{1.0}, 8.0, 3, 1);
    for (const auto& r : flat.rows) CHECK(r.rms_u == 0.0);
    CHECK(fit_decay(flat.rows, DecayColumn::rms_u, 1.0, 8.0).status == "all points at noise floor");

    const auto s = decay_study(lognormal(2.0), PeriodicGrid(1, 256, 256.0), Direction{1.0}, 16.0, 8, 2);
    for (std::size_t j = 1; j < s.rows.size(); ++j) CHECK(s.rows[j].rms_u <= s.rows[j - 1].rms_u * (1 + 1e-12));
    const auto f = fit_decay(s.rows, DecayColumn::rms_u, 1.0, 16.0);
    CHECK(f.status == "ok");
    CHECK(f.fit->slope < 0.0);
}

} // TEST_SUITE
