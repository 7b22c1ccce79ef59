#include "homog/krylov.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "homog/errors.hpp"
#include "homog/fft.hpp"
#include "homog/summation.hpp"

namespace homog {

void SolverConfig::validate() const
{
    if (!(tol > 0.0) || !(tol < 1.0)) throw ValidationError("tolerance must lie in (0, 1)", "solver.tol");
}

std::string to_string(Preconditioner p)
{
    switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::jacobi: return "jacobi";
    case Preconditioner::fourier: return "fourier";
    }
    return "?";
}

std::string to_string(Backend b)
{
    switch (b) {
    case Backend::automatic: return "auto";
    case Backend::cg: return "cg";
    case Backend::direct: return "direct";
    }
    return "?";
}

namespace {

using Vec = std::vector<double>;

void check_compatible(std::span<const double> b)
{
    const double m = mean(b);
    const double rms = std::sqrt(dot(b, b) / static_cast<double>(b.size()));
    if (std::abs(m) > 1e-10 * rms)
        throw IncompatibleRhsError("right-hand side has mean " + std::to_string(m) +
                                   "; the singular system needs a mean-zero right-hand side");
}

void project_meanzero(std::span<double> x)
{
    const double m = mean(x);
    for (double& v : x) v -= m;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// y <- y + alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= parallel::kMinParallelWork)
    for (long i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

// p <- z + beta p
void xpby(std::span<const double> z, double beta, std::span<double> p)
{
    const long n = static_cast<long>(z.size());
#pragma omp parallel for schedule(static) if (z.size() >= parallel::kMinParallelWork)
    for (long i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
}

// out = tau x + A x
void apply_operator(const EdgeCoefficientField& a, double tau, std::span<const double> x, std::span<double> out)
{
    apply_A_into(a, x, out);
    if (tau != 0.0) axpy(tau, x, out);
}

/// Inverse of tau + c * (discrete Laplacian) applied in Fourier space, with c
/// the geometric mean of the face coefficients.
class SpectralPreconditioner {
public:
    SpectralPreconditioner(const EdgeCoefficientField& a, double tau)
        : fft_(a.grid), spectrum_(fft_.spectrum_size()), inverse_symbol_(fft_.spectrum_size())
    {
        const PeriodicGrid& g = a.grid;
        KahanSum logs;
        for (double v : a.values) logs.add(std::log(v));
        const double c = std::exp(logs.value() / static_cast<double>(a.values.size()));
        const double h = g.spacing();
        const auto n = static_cast<double>(g.cells());
        const std::size_t cols = fft_.spectrum_columns();
        auto mode = [&](std::size_t m) {
            const double s = std::sin(std::numbers::pi * static_cast<double>(m) / n);
            return 4.0 * s * s / (h * h);
        };
        for (std::size_t j = 0; j < spectrum_.size(); ++j) {
            double symbol = mode(j % cols);
            if (g.dim() == 2) symbol += mode(j / cols);
            symbol = tau + c * symbol;
            inverse_symbol_[j] = symbol > 0.0 ? 1.0 / symbol : 0.0;
        }
        scale_ = 1.0 / static_cast<double>(g.size());
    }

    void apply(std::span<const double> r, std::span<double> z)
    {
        fft_.forward(r, spectrum_);
        for (std::size_t j = 0; j < spectrum_.size(); ++j) spectrum_[j] *= inverse_symbol_[j] * scale_;
        fft_.inverse(spectrum_, z);
    }

private:
    RealFft fft_;
    std::vector<std::complex<double>> spectrum_;
    std::vector<double> inverse_symbol_;
    double scale_ = 1.0;
};

SolveResult conjugate_gradient(const EdgeCoefficientField& a, double tau, const CellField& b_in,
                               const SolverConfig& cfg, const CgHooks& hooks, bool meanzero)
{
    cfg.validate();
    const PeriodicGrid& grid = a.grid;
    if (!(b_in.grid == grid)) throw ValidationError("right-hand side lives on a different grid");
    const std::size_t n = grid.size();

    Vec b = b_in.values;
    if (meanzero) {
        check_compatible(b);
        project_meanzero(b);
    }
    SolveResult result{CellField(grid), {}};
    Vec& x = result.x.values;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        result.report = {0, 0.0, true};
        return result;
    }
    if (!hooks.initial_guess.empty()) {
        if (hooks.initial_guess.size() != n) throw ValidationError("initial guess has the wrong length");
        x.assign(hooks.initial_guess.begin(), hooks.initial_guess.end());
        if (meanzero) project_meanzero(x);
    }

    std::optional<SpectralPreconditioner> spectral;
    Vec inv_diag;
    if (cfg.preconditioner == Preconditioner::fourier) spectral.emplace(a, tau);
    if (cfg.preconditioner == Preconditioner::jacobi) {
        inv_diag = diagonal_A(a);
        for (double& v : inv_diag) v = 1.0 / (v + tau);
    }
    auto precondition = [&](std::span<const double> r, std::span<double> z) {
        switch (cfg.preconditioner) {
        case Preconditioner::none: std::copy(r.begin(), r.end(), z.begin()); break;
        case Preconditioner::jacobi:
            for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
            break;
        case Preconditioner::fourier: spectral->apply(r, z); break;
        }
        if (meanzero) project_meanzero(z);
    };

    const double target = cfg.tol * bnorm;
    const std::size_t maxit = cfg.max_iterations(grid);
    Vec r(n), z(n), p(n), q(n);

    auto true_residual = [&] {
        apply_operator(a, tau, x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        if (meanzero) project_meanzero(r);
        return norm2(r);
    };

    double rnorm = true_residual();
    std::size_t it = 0;
    while (rnorm > target && it < maxit) {
        // (Re)start from the current true residual.
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        while (it < maxit) {
            apply_operator(a, tau, p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            axpy(alpha, p, x);
            axpy(-alpha, q, r);
            if (meanzero) project_meanzero(x);
            ++it;
            if (hooks.observer) hooks.observer(it, x);
            if (norm2(r) <= target) break;
            precondition(r, z);
            const double rz_next = dot(r, z);
            xpby(z, rz_next / rz, p);
            rz = rz_next;
        }
        const double previous = rnorm;
        rnorm = true_residual();
        // No progress across a restart: attainable accuracy reached.
        if (rnorm > target && rnorm >= previous) break;
    }

    result.report = {it, rnorm, rnorm <= target};
    if (!result.report.converged)
        throw NonConvergenceError("CG did not converge: relative residual " + std::to_string(rnorm / bnorm) +
                                  " after " + std::to_string(it) + " iterations");
    return result;
}

// Solves the symmetric tridiagonal system with diagonal `diag` and
// off-diagonal `off` (off[i] couples i and i+1) by the Thomas algorithm.
void thomas(std::span<const double> diag, std::span<const double> off, std::span<const double> rhs,
            std::span<double> x, std::span<double> work)
{
    const std::size_t m = diag.size();
    double denom = diag[0];
    x[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < m; ++i) {
        work[i] = off[i - 1] / denom;
        denom = diag[i] - off[i - 1] * work[i];
        x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / denom;
    }
    for (std::size_t i = m - 1; i-- > 0;) x[i] -= work[i + 1] * x[i + 1];
}

// One exact solve of (tau + A) x = b in 1D. For tau == 0 the cell-0 value is
// pinned to zero and the caller projects.
void cyclic_solve(const EdgeCoefficientField& a, double tau, std::span<const double> b, std::span<double> x)
{
    const std::size_t n = a.grid.cells();
    const double s = 1.0 / (a.grid.spacing() * a.grid.spacing());
    auto face = a.direction(0);
    const std::size_t m = n - 1; // unknowns 1..n-1
    Vec diag(m), off(m > 0 ? m - 1 : 0), rhs(m), coupling(m, 0.0), y1(m), y2(m), work(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + 1;
        diag[j] = tau + s * (face[i] + face[i - 1]);
        if (j + 1 < m) off[j] = -s * face[i];
        rhs[j] = b[i];
    }
    coupling[0] += -s * face[0];
    coupling[m - 1] += -s * face[n - 1];
    thomas(diag, off, rhs, y1, work);

    double x0 = 0.0;
    if (tau > 0.0) {
        thomas(diag, off, coupling, y2, work);
        double cy1 = 0.0, cy2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            cy1 += coupling[j] * y1[j];
            cy2 += coupling[j] * y2[j];
        }
        const double d0 = tau + s * (face[0] + face[n - 1]);
        x0 = (b[0] - cy1) / (d0 - cy2);
        x[0] = x0;
        for (std::size_t j = 0; j < m; ++j) x[j + 1] = y1[j] - x0 * y2[j];
    } else {
        x[0] = 0.0;
        for (std::size_t j = 0; j < m; ++j) x[j + 1] = y1[j];
    }
}

SolveResult direct_solve(const EdgeCoefficientField& a, double tau, const CellField& b_in, const SolverConfig& cfg,
                         bool meanzero)
{
    cfg.validate();
    const PeriodicGrid& grid = a.grid;
    if (grid.dim() != 1) throw ValidationError("the direct solver is one-dimensional only", "solver.backend");
    if (!(b_in.grid == grid)) throw ValidationError("right-hand side lives on a different grid");
    Vec b = b_in.values;
    if (meanzero) {
        check_compatible(b);
        project_meanzero(b);
    }
    const std::size_t n = grid.size();
    SolveResult result{CellField(grid), {}};
    Vec& x = result.x.values;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        result.report = {0, 0.0, true};
        return result;
    }
    Vec r = b, dx(n), q(n);
    double rnorm = bnorm;
    std::size_t passes = 0;
    for (; passes < 3 && rnorm > cfg.tol * bnorm; ++passes) {
        cyclic_solve(a, tau, r, dx);
        axpy(1.0, dx, x);
        if (meanzero) project_meanzero(x);
        apply_operator(a, tau, x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        if (meanzero) project_meanzero(r);
        rnorm = norm2(r);
    }
    result.report = {passes, rnorm, rnorm <= cfg.tol * bnorm};
    if (!result.report.converged)
        throw NonConvergenceError("direct solve left relative residual " + std::to_string(rnorm / bnorm));
    return result;
}

bool use_direct(const SolverConfig& cfg, const PeriodicGrid& grid)
{
    return cfg.backend == Backend::direct || (cfg.backend == Backend::automatic && grid.dim() == 1);
}

} // namespace

SolveResult cg_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg,
                        const CgHooks& hooks)
{
    return conjugate_gradient(a, 0.0, b, cfg, hooks, true);
}

SolveResult cg_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg,
                       const CgHooks& hooks)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("shift must be positive", "tau");
    return conjugate_gradient(a, tau, b, cfg, hooks, false);
}

SolveResult direct_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg)
{
    return direct_solve(a, 0.0, b, cfg, true);
}

SolveResult direct_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("shift must be positive", "tau");
    return direct_solve(a, tau, b, cfg, false);
}

SolveResult solve_meanzero(const EdgeCoefficientField& a, const CellField& b, const SolverConfig& cfg)
{
    return use_direct(cfg, a.grid) ? direct_meanzero(a, b, cfg) : cg_meanzero(a, b, cfg);
}

SolveResult solve_shifted(const EdgeCoefficientField& a, double tau, const CellField& b, const SolverConfig& cfg)
{
    return use_direct(cfg, a.grid) ? direct_shifted(a, tau, b, cfg) : cg_shifted(a, tau, b, cfg);
}

} // namespace homog
