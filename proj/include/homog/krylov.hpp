#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "homog/grid.hpp"

namespace homog {

enum class Preconditioner { none, jacobi, fourier };

/// `automatic` picks the exact periodic tridiagonal solver in 1D and CG in 2D.
enum class Backend { automatic, cg, direct };

struct SolverConfig {
    double tol = 1e-10;          // relative residual
    std::size_t maxit = 0;       // 0 means 50 * N
    Preconditioner preconditioner = Preconditioner::none;
    Backend backend = Backend::automatic;

    std::size_t max_iterations(const PeriodicGrid& grid) const { return maxit ? maxit : 50 * grid.cells(); }
    void validate() const;
};

std::string to_string(Preconditioner p);
std::string to_string(Backend b);

struct SolveReport {
    std::size_t iterations = 0;
    double residual_norm = 0.0;   // Euclidean norm of b - Mx, recomputed on exit
    bool converged = false;
};

struct SolveResult {
    CellField x;
    SolveReport report;
};

/// Optional CG instrumentation: an initial guess and a per-iteration callback
/// receiving the current iterate.
struct CgHooks {
    std::span<const double> initial_guess;
    std::function<void(std::size_t, std::span<const double>)> observer;
};

/// Solves A x = b on the mean-zero subspace. Throws IncompatibleRhsError when
/// |mean(b)| > 1e-10 rms(b) and NonConvergenceError after maxit.
SolveResult cg_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg = {},
                        const CgHooks& hooks = {});

/// Solves (tau I + A) x = b, tau > 0.
SolveResult cg_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg = {},
                       const CgHooks& hooks = {});

/// Exact 1D solves of the periodic tridiagonal systems (elimination of cell 0
/// followed by two Thomas sweeps), with up to two refinement passes.
SolveResult direct_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg = {});
SolveResult direct_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg = {});

/// Backend dispatch used by the higher-level modules.
SolveResult solve_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg = {});
SolveResult solve_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg = {});

} // namespace homog
