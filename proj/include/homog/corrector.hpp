#pragma once

#include <limits>
#include <optional>
#include <string>

#include "homog/grid.hpp"
#include "homog/krylov.hpp"
#include "homog/parabolic.hpp"

namespace homog {

/// Corrector formulations on the periodic box:
///  naive:               A chi = f0
///  zeroth_order:        (1/T + A) chi_T = f0
///  modified:            A chi_T = f0 - u(T), u the parabolic solution from f0
///  modified_quadrature: chi_T = sum_n w_n u^n (time integral of u up to T)
enum class Method { naive, zeroth_order, modified, modified_quadrature };

std::string to_string(Method m);
std::optional<Method> parse_method(const std::string& s);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct CorrectorSolution {
    Method method = Method::naive;
    double T = kInfiniteTime;
    CellField chi;            // mean zero
    FaceField grad_chi;       // gradient(chi)
    SolveReport report;       // of the elliptic solve (or the last parabolic step)
    double residual_norm = 0.0; // of the defining equation
    double rhs_norm = 0.0;      // ||f0||
};

struct CorrectorConfig {
    SolverConfig solver;
    ScheduleParams schedule;
};

CorrectorSolution solve_naive(const EdgeCoefficientField& a, const Direction& xi, const SolverConfig& solver = {});

CorrectorSolution solve_zeroth_order(const EdgeCoefficientField& a, const Direction& xi, double T,
                                     const SolverConfig& solver = {});

/// Runs the parabolic problem to T on `schedule` and solves A chi_T = f0 - u^N.
CorrectorSolution solve_modified(const EdgeCoefficientField& a, const Direction& xi, const TimeSchedule& schedule,
                                 const SolverConfig& solver = {});

/// Elliptic half of solve_modified for a parabolic state already computed.
CorrectorSolution solve_modified_from_state(const EdgeCoefficientField& a, const CellField& f0,
                                            const CellField& u_T, double T, const SolverConfig& solver = {});

CorrectorSolution solve_modified_quadrature(const EdgeCoefficientField& a, const Direction& xi,
                                            const TimeSchedule& schedule, const SolverConfig& solver = {});

/// Dispatch by method; T is ignored for naive. The parabolic methods use the
/// geometric schedule for T built from `config.schedule`.
CorrectorSolution solve_corrector(Method method, const EdgeCoefficientField& a, const Direction& xi, double T,
                                  const CorrectorConfig& config = {});

} // namespace homog
