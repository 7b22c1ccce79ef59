#include <cmath>

#include "homog/errors.hpp"
#include "homog/grid.hpp"
#include "homog/summation.hpp"

namespace homog {
namespace {

inline std::size_t next(std::size_t i, std::size_t n) noexcept { return i + 1 == n ? 0 : i + 1; }
inline std::size_t prev(std::size_t i, std::size_t n) noexcept { return i == 0 ? n - 1 : i - 1; }

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b)
{
    if (!(a == b)) throw ValidationError("operands live on different grids");
}

} // namespace

void gradient_into(const PeriodicGrid& grid, std::span<const double> v, std::span<double> out)
{
    const std::size_t n = grid.cells();
    const std::size_t total = grid.size();
    const double inv_h = 1.0 / grid.spacing();
    const bool par = total >= parallel::kMinParallelWork;
    if (grid.dim() == 1) {
        const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
        for (long li = 0; li < ln; ++li) {
            const auto i = static_cast<std::size_t>(li);
            out[i] = (v[next(i, n)] - v[i]) * inv_h;
        }
        return;
    }
    auto gx = out.subspan(0, total);
    auto gy = out.subspan(total, total);
    const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
    for (long lj = 0; lj < ln; ++lj) {
        const auto j = static_cast<std::size_t>(lj);
        const std::size_t row = j * n;
        const std::size_t row_up = next(j, n) * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = v[row + i];
            gx[row + i] = (v[row + next(i, n)] - c) * inv_h;
            gy[row + i] = (v[row_up + i] - c) * inv_h;
        }
    }
}

FaceField gradient(const CellField& v)
{
    FaceField out(v.grid);
    gradient_into(v.grid, v.values, out.values);
    return out;
}

CellField divergence(const FaceField& f)
{
    const PeriodicGrid& grid = f.grid;
    const std::size_t n = grid.cells();
    const double inv_h = 1.0 / grid.spacing();
    CellField out(grid);
    auto fx = f.direction(0);
    const bool par = grid.size() >= parallel::kMinParallelWork;
    if (grid.dim() == 1) {
        const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
        for (long li = 0; li < ln; ++li) {
            const auto i = static_cast<std::size_t>(li);
            out.values[i] = (fx[i] - fx[prev(i, n)]) * inv_h;
        }
        return out;
    }
    auto fy = f.direction(1);
    const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
    for (long lj = 0; lj < ln; ++lj) {
        const auto j = static_cast<std::size_t>(lj);
        const std::size_t row = j * n;
        const std::size_t row_dn = prev(j, n) * n;
        for (std::size_t i = 0; i < n; ++i)
            out.values[row + i] = (fx[row + i] - fx[row + prev(i, n)] + fy[row + i] - fy[row_dn + i]) * inv_h;
    }
    return out;
}

void apply_A_into(const EdgeCoefficientField& a, std::span<const double> v, std::span<double> out)
{
    const PeriodicGrid& grid = a.grid;
    const std::size_t n = grid.cells();
    const double h = grid.spacing();
    const double s = 1.0 / (h * h);
    auto ax = a.direction(0);
    const bool par = grid.size() >= parallel::kMinParallelWork;
    if (grid.dim() == 1) {
        const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
        for (long li = 0; li < ln; ++li) {
            const auto i = static_cast<std::size_t>(li);
            const std::size_t ip = next(i, n), im = prev(i, n);
            const double c = v[i];
            out[i] = -s * (ax[i] * (v[ip] - c) - ax[im] * (c - v[im]));
        }
        return;
    }
    auto ay = a.direction(1);
    const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (par)
    for (long lj = 0; lj < ln; ++lj) {
        const auto j = static_cast<std::size_t>(lj);
        const std::size_t row = j * n;
        const std::size_t up = next(j, n) * n;
        const std::size_t dn = prev(j, n) * n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = next(i, n), im = prev(i, n);
            const double c = v[row + i];
            const double fx = ax[row + i] * (v[row + ip] - c) - ax[row + im] * (c - v[row + im]);
            const double fy = ay[row + i] * (v[up + i] - c) - ay[dn + i] * (c - v[dn + i]);
            out[row + i] = -s * (fx + fy);
        }
    }
}

CellField apply_A(const EdgeCoefficientField& a, const CellField& v)
{
    require_same_grid(a.grid, v.grid);
    CellField out(v.grid);
    apply_A_into(a, v.values, out.values);
    return out;
}

std::vector<double> diagonal_A(const EdgeCoefficientField& a)
{
    const PeriodicGrid& grid = a.grid;
    const double s = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<double> diag(grid.size(), 0.0);
    for (int k = 0; k < grid.dim(); ++k) {
        auto ak = a.direction(k);
        for (std::size_t i = 0; i < grid.size(); ++i)
            diag[i] += s * (ak[i] + ak[grid.neighbor(i, k, -1)]);
    }
    return diag;
}

CellField assemble_f0(const EdgeCoefficientField& a, const Direction& xi)
{
    if (xi.dim() != a.grid.dim()) throw ValidationError("direction dimension does not match grid", "xi");
    FaceField flux(a.grid);
    for (int k = 0; k < a.grid.dim(); ++k) {
        auto src = a.direction(k);
        auto dst = flux.direction(k);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * xi[k];
    }
    return divergence(flux);
}

double face_energy_average(const EdgeCoefficientField& a, const FaceField& grad_chi, const Direction& xi,
                           const AveragingWindow& window)
{
    require_same_grid(a.grid, grad_chi.grid);
    const PeriodicGrid& grid = a.grid;
    if (xi.dim() != grid.dim()) throw ValidationError("direction dimension does not match grid", "xi");
    const std::size_t n = grid.cells();
    const std::size_t nl = window.cells(grid);
    const std::size_t start = (n - nl) / 2;
    const int d = grid.dim();
    const std::size_t count = d == 1 ? nl : nl * nl;

    auto term = [&](std::size_t w) {
        const std::size_t i = grid.index(start + w % nl, d == 2 ? start + w / nl : 0);
        double e = 0.0;
        for (int k = 0; k < d; ++k) {
            const double g = grad_chi.direction(k)[i] + xi[k];
            e += a.direction(k)[i] * g * g;
        }
        return e;
    };
    return detail::blocked_reduce(count, term) / static_cast<double>(count);
}

} // namespace homog
