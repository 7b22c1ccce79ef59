#include "homog/grid.hpp"

#include <cmath>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/summation.hpp"

namespace homog {

PeriodicGrid::PeriodicGrid(int dim, std::size_t cells, double side)
    : dim_(dim), cells_(cells), side_(side)
{
    if (dim != 1 && dim != 2) throw ValidationError("dimension must be 1 or 2", "dimension");
    if (cells < 2) throw ValidationError("need at least 2 cells per side", "cells");
    if (!(side > 0.0) || !std::isfinite(side)) throw ValidationError("side length must be positive", "side");
    size_ = dim == 1 ? cells : cells * cells;
}

PeriodicGrid PeriodicGrid::with_spacing(int dim, std::size_t cells, double spacing)
{
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("spacing must be positive", "spacing");
    return PeriodicGrid(dim, cells, spacing * static_cast<double>(cells));
}

std::size_t PeriodicGrid::neighbor(std::size_t idx, int k, long step) const noexcept
{
    auto c = coords(idx);
    const long n = static_cast<long>(cells_);
    long m = (static_cast<long>(c[static_cast<std::size_t>(k)]) + step) % n;
    if (m < 0) m += n;
    c[static_cast<std::size_t>(k)] = static_cast<std::size_t>(m);
    return index(c[0], c[1]);
}

CellField::CellField(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.size()) throw ValidationError("cell field length does not match grid");
}

template <class Tag>
FaceArray<Tag>::FaceArray(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v))
{
    if (values.size() != static_cast<std::size_t>(grid.dim()) * grid.size())
        throw ValidationError("face array length must be d * N^d");
}

template struct FaceArray<FaceFieldTag>;
template struct FaceArray<CoefficientTag>;

EdgeCoefficientField make_coefficients(const PeriodicGrid& grid, std::vector<double> values)
{
    EdgeCoefficientField a(grid, std::move(values));
    for (double x : a.values)
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValidationError("coefficients must be finite and strictly positive", "coefficients");
    return a;
}

Direction::Direction(std::span<const double> components)
{
    if (components.size() != 1 && components.size() != 2)
        throw ValidationError("direction must have 1 or 2 components", "xi");
    dim_ = static_cast<int>(components.size());
    c_ = {components[0], dim_ == 2 ? components[1] : 0.0};
    const double norm2 = c_[0] * c_[0] + c_[1] * c_[1];
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw ValidationError("direction must be a unit vector", "xi");
}

Direction::Direction(std::initializer_list<double> components)
    : Direction(std::span<const double>(components.begin(), components.size()))
{}

Direction Direction::axis(int dim, int k)
{
    if (k < 0 || k >= dim) throw ValidationError("axis index out of range", "xi");
    std::array<double, 2> c{0.0, 0.0};
    c[static_cast<std::size_t>(k)] = 1.0;
    return Direction(std::span<const double>(c.data(), static_cast<std::size_t>(dim)));
}

Direction Direction::operator-() const
{
    Direction out = *this;
    out.c_ = {-c_[0], -c_[1]};
    return out;
}

std::string Direction::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    os << c_[0];
    if (dim_ == 2) os << ' ' << c_[1];
    return os.str();
}

std::size_t AveragingWindow::cells(const PeriodicGrid& grid) const
{
    if (side == 0.0) return grid.cells();
    if (!(side > 0.0)) throw ValidationError("window side must be positive", "window");
    if (side > grid.side() * (1.0 + 1e-12)) throw ValidationError("window larger than the box", "window");
    const double n = side / grid.spacing();
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n) || rounded < 1.0)
        throw ValidationError("window side must be a positive multiple of the spacing", "window");
    return static_cast<std::size_t>(rounded);
}

VoigtReuss voigt_reuss_bounds(const EdgeCoefficientField& a, const Direction& xi)
{
    KahanSum arith, inv;
    const double n = static_cast<double>(a.grid.size());
    for (int k = 0; k < a.grid.dim(); ++k) {
        const double w = xi[k] * xi[k];
        if (w == 0.0) continue;
        KahanSum sa, si;
        for (double x : a.direction(k)) {
            sa.add(x);
            si.add(1.0 / x);
        }
        arith.add(w * sa.value() / n);
        inv.add(w * si.value() / n);
    }
    return {1.0 / inv.value(), arith.value()};
}

std::vector<double> cyclic_shift(const PeriodicGrid& grid, std::span<const double> cell_values,
                                 std::array<long, 2> offset)
{
    std::vector<double> out(cell_values.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t j = grid.neighbor(i, 0, offset[0]);
        if (grid.dim() == 2) j = grid.neighbor(j, 1, offset[1]);
        out[j] = cell_values[i];
    }
    return out;
}

} // namespace homog
