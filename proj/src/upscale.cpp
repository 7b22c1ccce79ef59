#include "homog/upscale.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homog/errors.hpp"
#include "homog/parallel.hpp"
#include "homog/seed.hpp"
#include "homog/summation.hpp"

namespace homog {
namespace {

struct MeanStats {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
};

MeanStats stats_of(std::span<const double> v)
{
    MeanStats s;
    const double m = static_cast<double>(v.size());
    if (v.empty()) return s;
    s.mean = kahan_sum(v) / m;
    if (v.size() > 1) {
        KahanSum acc;
        for (double x : v) acc.add((x - s.mean) * (x - s.mean));
        s.variance = acc.value() / (m - 1.0);
        s.std_error = std::sqrt(s.variance / m);
    }
    return s;
}

template <class Body>
void for_each_realization(std::size_t samples, Body body)
{
    parallel::ExceptionSlot slot;
    const long n = static_cast<long>(samples);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        if (slot.failed()) continue;
        slot.run([&] { body(static_cast<std::size_t>(i)); });
    }
    slot.rethrow();
}

} // namespace

double estimate_one(const EdgeCoefficientField& a, Method method, const Direction& xi, double T,
                    const EstimateConfig& config)
{
    const CorrectorSolution s = solve_corrector(method, a, xi, T, config.corrector);
    return face_energy_average(a, s.grad_chi, xi, config.window);
}

std::array<double, 4> estimate_tensor(const EdgeCoefficientField& a, Method method, double T,
                                      const EstimateConfig& config)
{
    if (a.grid.dim() != 2) throw ValidationError("tensor recovery needs d = 2", "polarization");
    const double a11 = estimate_one(a, method, Direction::axis(2, 0), T, config);
    const double a22 = estimate_one(a, method, Direction::axis(2, 1), T, config);
    const double c = 1.0 / std::numbers::sqrt2;
    const double q = estimate_one(a, method, Direction{c, c}, T, config);
    const double a12 = q - 0.5 * (a11 + a22);
    return {a11, a12, a12, a22};
}

bool within_bracket(double value, const VoigtReuss& b, double slack)
{
    return value >= b.harmonic * (1.0 - slack) && value <= b.arithmetic * (1.0 + slack);
}

UpscaleEstimate monte_carlo(const FieldLaw& law, const PeriodicGrid& grid, Method method, const Direction& xi,
                            double T, std::size_t samples, std::uint64_t master_seed, const EstimateConfig& config)
{
    if (samples == 0) throw ValidationError("need at least one realization", "realizations");
    if (xi.dim() != grid.dim()) throw ValidationError("direction dimension does not match grid", "xi");
    config.window.cells(grid);
    const CoefficientSampler sampler(grid, law, config.spectrum_threshold);

    UpscaleEstimate est;
    est.method = method;
    est.T = method == Method::naive ? kInfiniteTime : T;
    est.grid = grid;
    est.window_side = config.window.side == 0.0 ? grid.side() : config.window.side;
    est.xi = xi;
    est.samples = samples;
    est.master_seed = master_seed;
    est.values.assign(samples, 0.0);
    est.brackets.assign(samples, VoigtReuss{0.0, 0.0});

    for_each_realization(samples, [&](std::size_t i) {
        const EdgeCoefficientField a = sampler.sample(child_seed(master_seed, i));
        est.values[i] = estimate_one(a, method, xi, T, config);
        est.brackets[i] = voigt_reuss_bounds(a, xi);
    });

    const MeanStats s = stats_of(est.values);
    est.mean = s.mean;
    est.sample_variance = s.variance;
    est.std_error = s.std_error;
    // Brackets are for full-box averages.
    if (config.window.side == 0.0 || config.window.cells(grid) == grid.cells())
        for (std::size_t i = 0; i < samples; ++i)
            if (!within_bracket(est.values[i], est.brackets[i])) ++est.bracket_violations;
    return est;
}

PairedStudy paired_systematic_error(const FieldLaw& law, const PeriodicGrid& grid, const Direction& xi,
                                    std::span<const double> T_values, std::size_t samples,
                                    std::uint64_t master_seed, const EstimateConfig& config, Method method)
{
    if (samples == 0) throw ValidationError("need at least one realization", "realizations");
    if (T_values.empty()) throw ValidationError("need at least one T", "T");
    if (method != Method::modified && method != Method::modified_quadrature)
        throw ValidationError("paired study needs a parabolic method", "methods");
    std::vector<double> Ts(T_values.begin(), T_values.end());
    std::sort(Ts.begin(), Ts.end());
    Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
    for (double T : Ts)
        if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T values must be positive", "T");

    const CoefficientSampler sampler(grid, law, config.spectrum_threshold);
    const TimeSchedule schedule = TimeSchedule::geometric_with_stops(Ts, config.corrector.schedule);
    const SolverConfig& solver = config.corrector.solver;
    const std::size_t nt = Ts.size();

    std::vector<double> reference(samples);
    std::vector<double> estimates(samples * nt);
    std::vector<unsigned char> violations(samples, 0);

    for_each_realization(samples, [&](std::size_t i) {
        const EdgeCoefficientField a = sampler.sample(child_seed(master_seed, i));
        const CellField f0 = assemble_f0(a, xi);
        const VoigtReuss bracket = voigt_reuss_bounds(a, xi);
        const SolveResult naive = solve_meanzero(a, f0, solver);
        reference[i] = face_energy_average(a, gradient(naive.x), xi, config.window);
        bool bad = !within_bracket(reference[i], bracket);

        EvolveOptions opts;
        opts.snapshot_times = Ts;
        const ParabolicTrace trace = evolve_from(a, f0, schedule, solver, opts);
        for (std::size_t j = 0; j < nt; ++j) {
            const Snapshot& snap = trace.snapshots[j];
            double e;
            if (method == Method::modified) {
                const CorrectorSolution s = solve_modified_from_state(a, f0, snap.u, snap.t, solver);
                e = face_energy_average(a, s.grad_chi, xi, config.window);
            } else {
                e = face_energy_average(a, gradient(snap.quadrature), xi, config.window);
            }
            estimates[i * nt + j] = e;
            bad = bad || !within_bracket(e, bracket);
        }
        violations[i] = bad ? 1 : 0;
    });

    PairedStudy study;
    study.samples = samples;
    const MeanStats ref = stats_of(reference);
    study.reference_mean = ref.mean;
    study.reference_stderr = ref.std_error;
    const bool full_window = config.window.side == 0.0 || config.window.cells(grid) == grid.cells();
    if (full_window)
        for (unsigned char v : violations) study.bracket_violations += v;

    std::vector<double> diff(samples), est(samples);
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t i = 0; i < samples; ++i) {
            est[i] = estimates[i * nt + j];
            diff[i] = est[i] - reference[i];
        }
        const MeanStats d = stats_of(diff);
        const MeanStats e = stats_of(est);
        SystematicErrorRow row;
        row.T = Ts[j];
        row.err_sys = std::abs(d.mean);
        row.std_error = d.std_error;
        row.mean_estimate = e.mean;
        row.stderr_estimate = e.std_error;
        row.above_noise_floor = row.err_sys > 0.0 && row.err_sys >= 2.0 * row.std_error;
        study.rows.push_back(row);
    }
    return study;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 2) throw ValidationError("rate fit needs at least two points", "points");
    std::vector<double> lx, ly;
    for (auto [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("rate fit needs positive x and y", "points");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double n = static_cast<double>(points.size());
    const double mx = kahan_sum(lx) / n, my = kahan_sum(ly) / n;
    KahanSum sxx, sxy, syy;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx.add((lx[i] - mx) * (lx[i] - mx));
        sxy.add((lx[i] - mx) * (ly[i] - my));
        syy.add((ly[i] - my) * (ly[i] - my));
    }
    if (sxx.value() == 0.0) throw ValidationError("rate fit needs distinct x values", "points");
    RateFit fit;
    fit.points.assign(points.begin(), points.end());
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy.value() == 0.0 ? 1.0 : (sxy.value() * sxy.value()) / (sxx.value() * syy.value());
    return fit;
}

MaskedRateFit fit_above_noise_floor(std::span<const SystematicErrorRow> rows)
{
    MaskedRateFit out;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        out.used.push_back(r.above_noise_floor);
        if (r.above_noise_floor) pts.emplace_back(r.T, r.err_sys);
    }
    if (pts.empty()) {
        out.status = "all points at noise floor";
    } else if (pts.size() < 2) {
        out.status = "too few points above noise floor";
    } else {
        out.fit = fit_rate(pts);
        out.status = "ok";
    }
    return out;
}

DecayStudy decay_study(const FieldLaw& law, const PeriodicGrid& grid, const Direction& xi, double T,
                       std::size_t samples, std::uint64_t master_seed, const EstimateConfig& config)
{
    if (samples == 0) throw ValidationError("need at least one realization", "realizations");
    if (xi.dim() != grid.dim()) throw ValidationError("direction dimension does not match grid", "xi");
    const CoefficientSampler sampler(grid, law, config.spectrum_threshold);
    const TimeSchedule schedule = TimeSchedule::geometric(T, config.corrector.schedule);
    std::vector<ParabolicTrace> traces(samples);
    for_each_realization(samples, [&](std::size_t i) {
        const EdgeCoefficientField a = sampler.sample(child_seed(master_seed, i));
        ParabolicTrace tr = evolve(a, xi, schedule, config.corrector.solver);
        tr.initial_state = {};
        tr.final_state = {};
        tr.quadrature = {};
        traces[i] = std::move(tr);
    });
    DecayStudy out;
    out.samples = samples;
    out.rows = decay_diagnostics(traces);
    return out;
}

MaskedRateFit fit_decay(std::span<const DecayRow> rows, DecayColumn column, double t_lo, double t_hi)
{
    MaskedRateFit out;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        const double y = column == DecayColumn::rms_u ? r.rms_u : r.rms_grad_u;
        const bool use = r.t >= t_lo * (1.0 - 1e-12) && r.t <= t_hi * (1.0 + 1e-12) && y > 0.0;
        out.used.push_back(use);
        if (use) pts.emplace_back(r.t, y);
    }
    if (pts.empty()) {
        out.status = "all points at noise floor";
    } else if (pts.size() < 2) {
        out.status = "too few points above noise floor";
    } else {
        out.fit = fit_rate(pts);
        out.status = "ok";
    }
    return out;
}

SweepResult sweep_T_vs_R(const FieldLaw& law, int dim, std::span<const std::size_t> cells, double spacing,
                         std::span<const double> T_values, std::size_t samples, std::uint64_t master_seed,
                         const EstimateConfig& config)
{
    if (cells.empty()) throw ValidationError("need at least one box size", "sweep.cells");
    SweepResult out;
    for (std::size_t n : cells) {
        const PeriodicGrid grid = PeriodicGrid::with_spacing(dim, n, spacing);
        const Direction xi = Direction::axis(dim, 0);
        const PairedStudy study = paired_systematic_error(law, grid, xi, T_values, samples, master_seed, config);
        double best = study.rows.front().err_sys;
        for (const auto& r : study.rows) best = std::min(best, r.err_sys);
        double optimal = study.rows.back().T;
        for (const auto& r : study.rows) {
            out.rows.push_back({grid.side(), n, r.T, r.err_sys, r.stderr_estimate, r.std_error, samples});
            if (r.err_sys - best <= 2.0 * r.stderr_estimate) {
                optimal = std::min(optimal, r.T);
            }
        }
        out.optimal_T.emplace_back(grid.side(), optimal);
    }
    return out;
}

} // namespace homog
