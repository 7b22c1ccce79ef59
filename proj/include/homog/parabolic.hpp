#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "homog/grid.hpp"
#include "homog/krylov.hpp"

namespace homog {

enum class TimeScheme { implicit_euler, crank_nicolson };

std::string to_string(TimeScheme scheme);

/// Parameters of the default geometric step schedule: the first step is
/// min(dt0, fraction * T) and each following step grows by `growth`; steps
/// are truncated to land exactly on every requested stop time.
struct ScheduleParams {
    TimeScheme scheme = TimeScheme::implicit_euler;
    double dt0 = 0.05;
    double fraction = 1.0 / 200.0;
    double growth = 1.1;

    void validate() const;
};

struct TimeSchedule {
    TimeScheme scheme = TimeScheme::implicit_euler;
    std::vector<double> steps;

    double total() const;
    /// Cumulative times t_1 .. t_n.
    std::vector<double> times() const;
    void validate() const;

    static TimeSchedule uniform(double T, std::size_t nsteps, TimeScheme scheme = TimeScheme::implicit_euler);
    static TimeSchedule geometric(double T, const ScheduleParams& params = {});
    /// Geometric schedule ending at max(stops) that passes through every stop.
    /// The first step is sized from the smallest stop.
    static TimeSchedule geometric_with_stops(std::span<const double> stops, const ScheduleParams& params = {});
};

/// Spatial statistics of u at one recorded time.
struct TraceRecord {
    double t = 0.0;
    std::size_t step = 0;
    double mean_u = 0.0;
    double mean_u2 = 0.0;        // spatial mean of u^2
    double mean_grad_u2 = 0.0;   // mean over cells of sum_k (G u)_k^2
    double energy = 0.0;         // mean over cells of sum_k a_k (G u)_k^2
    double point_u = 0.0;        // u at the center cell
};

struct Snapshot {
    double t = 0.0;
    CellField u;
    CellField quadrature;
};

struct ParabolicTrace {
    std::vector<TraceRecord> records;
    CellField initial_state;
    CellField final_state;
    /// sum_n w_n u^n: rectangle rule for implicit Euler, trapezoid for
    /// Crank-Nicolson. A * quadrature = u^0 - u^N up to solver tolerance.
    CellField quadrature;
    std::vector<Snapshot> snapshots;
    std::size_t solver_iterations = 0;

    std::vector<double> times() const;
    std::vector<double> rms_u() const;
    std::vector<double> rms_grad_u() const;
};

struct EvolveOptions {
    /// Times (which must be step endpoints) at which u and the running
    /// quadrature are copied into `snapshots`.
    std::vector<double> snapshot_times;
    /// Record every step rather than powers of sqrt(2).
    bool record_every_step = false;
};

/// Integrates du/dt + A u = 0 from u^0 = assemble_f0(a, xi).
ParabolicTrace evolve(const EdgeCoefficientField& a, const Direction& xi, const TimeSchedule& schedule,
                      const SolverConfig& solver = {}, const EvolveOptions& options = {});

/// Same, from an arbitrary initial state.
ParabolicTrace evolve_from(const EdgeCoefficientField& a, const CellField& u0, const TimeSchedule& schedule,
                           const SolverConfig& solver = {}, const EvolveOptions& options = {});

/// Ensemble statistics at one recorded time. Spatial averages stand in for
/// expectations; standard errors are across realizations.
struct DecayRow {
    double t = 0.0;
    double mean_u = 0.0;
    double rms_u = 0.0;
    double rms_grad_u = 0.0;
    double stderr_u2 = 0.0;
    double stderr_grad_u2 = 0.0;
    double point_mean_u = 0.0;    // ensemble mean of u at the center cell
    double point_stderr_u = 0.0;
};

std::vector<DecayRow> decay_diagnostics(std::span<const ParabolicTrace> traces);

} // namespace homog
