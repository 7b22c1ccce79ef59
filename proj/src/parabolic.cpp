#include "homog/parabolic.hpp"

#include <algorithm>
#include <cmath>

#include "homog/errors.hpp"
#include "homog/summation.hpp"

namespace homog {

std::string to_string(TimeScheme scheme)
{
    return scheme == TimeScheme::implicit_euler ? "implicit_euler" : "crank_nicolson";
}

void ScheduleParams::validate() const
{
    if (!(dt0 > 0.0)) throw ValidationError("must be positive", "time.dt0");
    if (!(fraction > 0.0) || fraction > 1.0) throw ValidationError("must lie in (0, 1]", "time.fraction");
    if (!(growth >= 1.0)) throw ValidationError("must be at least 1", "time.growth");
}

double TimeSchedule::total() const
{
    KahanSum s;
    for (double dt : steps) s.add(dt);
    return s.value();
}

std::vector<double> TimeSchedule::times() const
{
    std::vector<double> t(steps.size());
    KahanSum s;
    for (std::size_t n = 0; n < steps.size(); ++n) {
        s.add(steps[n]);
        t[n] = s.value();
    }
    return t;
}

void TimeSchedule::validate() const
{
    if (steps.empty()) throw ValidationError("schedule has no steps", "time");
    for (double dt : steps)
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time steps must be positive", "time");
}

TimeSchedule TimeSchedule::uniform(double T, std::size_t nsteps, TimeScheme scheme)
{
    if (!(T > 0.0) || nsteps == 0) throw ValidationError("need T > 0 and at least one step", "time");
    TimeSchedule s{scheme, std::vector<double>(nsteps, T / static_cast<double>(nsteps))};
    return s;
}

TimeSchedule TimeSchedule::geometric(double T, const ScheduleParams& params)
{
    const double stop[] = {T};
    return geometric_with_stops(stop, params);
}

TimeSchedule TimeSchedule::geometric_with_stops(std::span<const double> stops_in, const ScheduleParams& params)
{
    params.validate();
    std::vector<double> stops(stops_in.begin(), stops_in.end());
    if (stops.empty()) throw ValidationError("need at least one stop time", "T");
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    if (!(stops.front() > 0.0) || !std::isfinite(stops.back())) throw ValidationError("stop times must be positive", "T");

    TimeSchedule s{params.scheme, {}};
    double dt = std::min(params.dt0, params.fraction * stops.front());
    double t = 0.0;
    for (double stop : stops) {
        while (t < stop) {
            double next = t + dt;
            // Merge a short remainder into this step rather than leaving a sliver.
            if (next >= stop || stop - next < 0.25 * dt) next = stop;
            s.steps.push_back(next - t);
            t = next;
            dt *= params.growth;
        }
    }
    return s;
}

std::vector<double> ParabolicTrace::times() const
{
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.t);
    return out;
}

std::vector<double> ParabolicTrace::rms_u() const
{
    std::vector<double> out;
    for (const auto& r : records) out.push_back(std::sqrt(r.mean_u2));
    return out;
}

std::vector<double> ParabolicTrace::rms_grad_u() const
{
    std::vector<double> out;
    for (const auto& r : records) out.push_back(std::sqrt(r.mean_grad_u2));
    return out;
}

namespace {

TraceRecord make_record(const EdgeCoefficientField& a, std::span<const double> u, double t, std::size_t step,
                        std::vector<double>& grad)
{
    const PeriodicGrid& g = a.grid;
    gradient_into(g, u, grad);
    const double cells = static_cast<double>(g.size());
    TraceRecord r;
    r.t = t;
    r.step = step;
    r.mean_u = mean(u);
    r.mean_u2 = dot(u, u) / cells;
    r.mean_grad_u2 = dot(grad, grad) / cells;
    r.energy = detail::blocked_reduce(grad.size(), [&](std::size_t j) { return a.values[j] * grad[j] * grad[j]; }) / cells;
    const std::size_t c = g.cells() / 2;
    r.point_u = u[g.index(c, g.dim() == 2 ? c : 0)];
    return r;
}

} // namespace

ParabolicTrace evolve_from(const EdgeCoefficientField& a, const CellField& u0, const TimeSchedule& schedule,
                           const SolverConfig& solver, const EvolveOptions& options)
{
    schedule.validate();
    const PeriodicGrid& g = a.grid;
    if (!(u0.grid == g)) throw ValidationError("initial state lives on a different grid");

    ParabolicTrace trace;
    trace.initial_state = u0;
    trace.quadrature = CellField(g);
    CellField u = u0;
    CellField rhs(g);
    std::vector<double> grad(static_cast<std::size_t>(g.dim()) * g.size());
    std::vector<double> au(g.size());

    const auto times = schedule.times();
    std::vector<double> snaps = options.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    for (double s : snaps) {
        const bool hit = std::any_of(times.begin(), times.end(),
                                     [s](double t) { return std::abs(t - s) <= 1e-9 * std::max(1.0, s); });
        if (!hit) throw ValidationError("snapshot time " + std::to_string(s) + " is not a step endpoint", "T");
    }
    std::size_t next_snap = 0;

    trace.records.push_back(make_record(a, u.values, 0.0, 0, grad));
    double threshold = 1.0 / 1024.0; // powers of sqrt(2)
    const double root2 = std::sqrt(2.0);

    for (std::size_t n = 0; n < schedule.steps.size(); ++n) {
        const double dt = schedule.steps[n];
        const double t = times[n];
        SolveResult step;
        if (schedule.scheme == TimeScheme::implicit_euler) {
            const double tau = 1.0 / dt;
            for (std::size_t i = 0; i < g.size(); ++i) rhs.values[i] = tau * u.values[i];
            step = solve_shifted(a, tau, rhs, solver);
            for (std::size_t i = 0; i < g.size(); ++i) trace.quadrature.values[i] += dt * step.x.values[i];
        } else {
            const double tau = 2.0 / dt;
            apply_A_into(a, u.values, au);
            for (std::size_t i = 0; i < g.size(); ++i) rhs.values[i] = tau * u.values[i] - au[i];
            step = solve_shifted(a, tau, rhs, solver);
            for (std::size_t i = 0; i < g.size(); ++i)
                trace.quadrature.values[i] += 0.5 * dt * (step.x.values[i] + u.values[i]);
        }
        trace.solver_iterations += step.report.iterations;
        u.values = std::move(step.x.values);

        bool snap = false;
        if (next_snap < snaps.size() && std::abs(t - snaps[next_snap]) <= 1e-9 * std::max(1.0, t)) {
            trace.snapshots.push_back({snaps[next_snap], u, trace.quadrature});
            ++next_snap;
            snap = true;
        }
        const bool last = n + 1 == schedule.steps.size();
        if (options.record_every_step || snap || last || t >= threshold) {
            trace.records.push_back(make_record(a, u.values, t, n + 1, grad));
        }
        while (threshold <= t) threshold *= root2;
    }
    trace.final_state = std::move(u);
    return trace;
}

ParabolicTrace evolve(const EdgeCoefficientField& a, const Direction& xi, const TimeSchedule& schedule,
                      const SolverConfig& solver, const EvolveOptions& options)
{
    return evolve_from(a, assemble_f0(a, xi), schedule, solver, options);
}

std::vector<DecayRow> decay_diagnostics(std::span<const ParabolicTrace> traces)
{
    if (traces.empty()) throw ValidationError("no traces to summarize");
    const auto& first = traces.front();
    for (const auto& tr : traces) {
        if (tr.records.size() != first.records.size())
            throw ValidationError("traces do not share a schedule");
        for (std::size_t j = 0; j < tr.records.size(); ++j)
            if (tr.records[j].t != first.records[j].t) throw ValidationError("traces do not share a schedule");
    }
    const double m = static_cast<double>(traces.size());
    auto stderr_of = [m](const std::vector<double>& v, double mu) {
        if (v.size() < 2) return 0.0;
        KahanSum s;
        for (double x : v) s.add((x - mu) * (x - mu));
        return std::sqrt(s.value() / (m - 1.0) / m);
    };

    std::vector<DecayRow> rows;
    std::vector<double> u, u2, gu2, pu;
    for (std::size_t j = 0; j < first.records.size(); ++j) {
        u.clear(); u2.clear(); gu2.clear(); pu.clear();
        for (const auto& tr : traces) {
            u.push_back(tr.records[j].mean_u);
            u2.push_back(tr.records[j].mean_u2);
            gu2.push_back(tr.records[j].mean_grad_u2);
            pu.push_back(tr.records[j].point_u);
        }
        DecayRow row;
        row.t = first.records[j].t;
        row.mean_u = kahan_sum(u) / m;
        const double mu2 = kahan_sum(u2) / m;
        const double mgu2 = kahan_sum(gu2) / m;
        row.rms_u = std::sqrt(mu2);
        row.rms_grad_u = std::sqrt(mgu2);
        row.stderr_u2 = stderr_of(u2, mu2);
        row.stderr_grad_u2 = stderr_of(gu2, mgu2);
        row.point_mean_u = kahan_sum(pu) / m;
        row.point_stderr_u = stderr_of(pu, row.point_mean_u);
        rows.push_back(row);
    }
    return rows;
}

} // namespace homog
