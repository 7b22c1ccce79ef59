#include "homog/corrector.hpp"

#include <cmath>

#include "homog/errors.hpp"
#include "homog/summation.hpp"

namespace homog {

std::string to_string(Method m)
{
    switch (m) {
    case Method::naive: return "naive";
    case Method::zeroth_order: return "zeroth_order";
    case Method::modified: return "modified";
    case Method::modified_quadrature: return "modified_quadrature";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& s)
{
    for (Method m : {Method::naive, Method::zeroth_order, Method::modified, Method::modified_quadrature})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

namespace {

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// ||tau chi + A chi - rhs||
double residual(const EdgeCoefficientField& a, double tau, const CellField& chi, std::span<const double> rhs)
{
    std::vector<double> r(chi.values.size());
    apply_A_into(a, chi.values, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += tau * chi.values[i] - rhs[i];
    return norm(r);
}

void require_positive_time(double T)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T must be positive and finite", "T");
}

CorrectorSolution finish(Method method, double T, const EdgeCoefficientField& a, CellField chi, SolveReport report,
                         double tau, std::span<const double> rhs, std::span<const double> f0)
{
    CorrectorSolution s;
    s.method = method;
    s.T = T;
    s.grad_chi = gradient(chi);
    s.residual_norm = residual(a, tau, chi, rhs);
    s.rhs_norm = norm(f0);
    s.chi = std::move(chi);
    s.report = report;
    return s;
}

} // namespace

CorrectorSolution solve_naive(const EdgeCoefficientField& a, const Direction& xi, const SolverConfig& solver)
{
    const CellField f0 = assemble_f0(a, xi);
    SolveResult r = solve_meanzero(a, f0, solver);
    return finish(Method::naive, kInfiniteTime, a, std::move(r.x), r.report, 0.0, f0.values, f0.values);
}

CorrectorSolution solve_zeroth_order(const EdgeCoefficientField& a, const Direction& xi, double T,
                                     const SolverConfig& solver)
{
    require_positive_time(T);
    const CellField f0 = assemble_f0(a, xi);
    const double tau = 1.0 / T;
    SolveResult r = solve_shifted(a, tau, f0, solver);
    return finish(Method::zeroth_order, T, a, std::move(r.x), r.report, tau, f0.values, f0.values);
}

CorrectorSolution solve_modified_from_state(const EdgeCoefficientField& a, const CellField& f0,
                                            const CellField& u_T, double T, const SolverConfig& solver)
{
    require_positive_time(T);
    CellField rhs(a.grid);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) rhs.values[i] = f0.values[i] - u_T.values[i];
    SolveResult r = solve_meanzero(a, rhs, solver);
    return finish(Method::modified, T, a, std::move(r.x), r.report, 0.0, rhs.values, f0.values);
}

CorrectorSolution solve_modified(const EdgeCoefficientField& a, const Direction& xi, const TimeSchedule& schedule,
                                 const SolverConfig& solver)
{
    const CellField f0 = assemble_f0(a, xi);
    const ParabolicTrace trace = evolve_from(a, f0, schedule, solver);
    return solve_modified_from_state(a, f0, trace.final_state, schedule.total(), solver);
}

CorrectorSolution solve_modified_quadrature(const EdgeCoefficientField& a, const Direction& xi,
                                            const TimeSchedule& schedule, const SolverConfig& solver)
{
    const CellField f0 = assemble_f0(a, xi);
    ParabolicTrace trace = evolve_from(a, f0, schedule, solver);
    CellField chi = std::move(trace.quadrature);
    const double m = mean(chi.values);
    for (double& v : chi.values) v -= m;
    std::vector<double> rhs(f0.values.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = f0.values[i] - trace.final_state.values[i];
    SolveReport report{trace.solver_iterations, 0.0, true};
    CorrectorSolution s =
        finish(Method::modified_quadrature, schedule.total(), a, std::move(chi), report, 0.0, rhs, f0.values);
    s.report.residual_norm = s.residual_norm;
    return s;
}

CorrectorSolution solve_corrector(Method method, const EdgeCoefficientField& a, const Direction& xi, double T,
                                  const CorrectorConfig& config)
{
    switch (method) {
    case Method::naive: return solve_naive(a, xi, config.solver);
    case Method::zeroth_order: return solve_zeroth_order(a, xi, T, config.solver);
    case Method::modified:
        require_positive_time(T);
        return solve_modified(a, xi, TimeSchedule::geometric(T, config.schedule), config.solver);
    case Method::modified_quadrature:
        require_positive_time(T);
        return solve_modified_quadrature(a, xi, TimeSchedule::geometric(T, config.schedule), config.solver);
    }
    throw ValidationError("unknown method", "methods");
}

} // namespace homog
