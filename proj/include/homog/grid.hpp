#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace homog {

/// Periodic structured grid on the box [-R/2, R/2]^d, d in {1, 2}, with N
/// cells per side. Cells are stored row-major with direction 0 varying
/// fastest: cell (i0, i1) has linear index i0 + N * i1.
class PeriodicGrid {
public:
    PeriodicGrid() = default;
    PeriodicGrid(int dim, std::size_t cells, double side);

    /// Grid with spacing h and N cells per side (R = N h).
    static PeriodicGrid with_spacing(int dim, std::size_t cells, double spacing);

    int dim() const noexcept { return dim_; }
    std::size_t cells() const noexcept { return cells_; }
    double side() const noexcept { return side_; }
    double spacing() const noexcept { return side_ / static_cast<double>(cells_); }
    /// N^d
    std::size_t size() const noexcept { return size_; }
    /// Linear-index offset of a +1 step in direction k.
    std::size_t stride(int k) const noexcept { return k == 0 ? 1 : cells_; }

    std::size_t index(std::size_t i0, std::size_t i1 = 0) const noexcept { return i0 + cells_ * i1; }
    std::array<std::size_t, 2> coords(std::size_t idx) const noexcept
    {
        return {idx % cells_, dim_ == 2 ? idx / cells_ : 0};
    }
    /// Neighbor of cell `idx` shifted by `step` (any sign) in direction k, with wraparound.
    std::size_t neighbor(std::size_t idx, int k, long step) const noexcept;

    bool operator==(const PeriodicGrid&) const = default;

private:
    int dim_ = 1;
    std::size_t cells_ = 2;
    double side_ = 2.0;
    std::size_t size_ = 2;
};

/// Scalar unknowns on cells.
struct CellField {
    PeriodicGrid grid;
    std::vector<double> values;

    CellField() = default;
    explicit CellField(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    CellField(const PeriodicGrid& g, std::vector<double> v);

    std::span<double> span() noexcept { return values; }
    std::span<const double> span() const noexcept { return values; }
};

/// One value per face per direction, direction-major: face (i, k) separates
/// cell i from its +e_k neighbor and lives at values[k * N^d + i].
template <class Tag>
struct FaceArray {
    PeriodicGrid grid;
    std::vector<double> values;

    FaceArray() = default;
    explicit FaceArray(const PeriodicGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.dim()) * g.size(), fill)
    {}
    FaceArray(const PeriodicGrid& g, std::vector<double> v);

    std::span<double> direction(int k) noexcept
    {
        return std::span<double>(values).subspan(static_cast<std::size_t>(k) * grid.size(), grid.size());
    }
    std::span<const double> direction(int k) const noexcept
    {
        return std::span<const double>(values).subspan(static_cast<std::size_t>(k) * grid.size(), grid.size());
    }
};

struct FaceFieldTag;
struct CoefficientTag;

/// Gradients and fluxes.
using FaceField = FaceArray<FaceFieldTag>;

/// Discrete scalar coefficient a(x), one value per face. All values are
/// finite and strictly positive; `make_coefficients` enforces it.
using EdgeCoefficientField = FaceArray<CoefficientTag>;

EdgeCoefficientField make_coefficients(const PeriodicGrid& grid, std::vector<double> values);

/// Unit vector in R^d.
class Direction {
public:
    explicit Direction(std::span<const double> components);
    Direction(std::initializer_list<double> components);

    /// Unit coordinate vector e_k in dimension d.
    static Direction axis(int dim, int k);

    int dim() const noexcept { return dim_; }
    double operator[](int k) const noexcept { return c_[static_cast<std::size_t>(k)]; }
    Direction operator-() const;
    std::string to_string() const;

private:
    int dim_ = 1;
    std::array<double, 2> c_{1.0, 0.0};
};

/// Centered, cell-aligned sub-box K_L of the periodic box. L = 0 means the
/// full box.
struct AveragingWindow {
    double side = 0.0;

    static AveragingWindow full() { return {}; }
    /// Cells per side inside the window; throws if L > R or L is not a
    /// multiple of h.
    std::size_t cells(const PeriodicGrid& grid) const;
};

// Kernels. OpenMP-parallel over cells; equivalent serial versions live in
// homog::reference (kernels_reference.hpp) and are kept for testing.

/// (Gv)_{i,k} = (v_{i+e_k} - v_i) / h
FaceField gradient(const CellField& v);
void gradient_into(const PeriodicGrid& grid, std::span<const double> v, std::span<double> out);

/// (DF)_i = sum_k (F_{i,k} - F_{i-e_k,k}) / h
CellField divergence(const FaceField& f);

/// A v = -D(a * G v)
CellField apply_A(const EdgeCoefficientField& a, const CellField& v);
void apply_A_into(const EdgeCoefficientField& a, std::span<const double> v, std::span<double> out);

/// Diagonal of A, used by the Jacobi preconditioner.
std::vector<double> diagonal_A(const EdgeCoefficientField& a);

/// f0 = D(a xi), the discrete initial datum div(a xi).
CellField assemble_f0(const EdgeCoefficientField& a, const Direction& xi);

/// Mean over the cells of `window` of sum_k a_{i,k} ((G chi)_{i,k} + xi_k)^2.
double face_energy_average(const EdgeCoefficientField& a, const FaceField& grad_chi, const Direction& xi,
                           const AveragingWindow& window = AveragingWindow::full());

/// Voigt (arithmetic) and Reuss (harmonic) bounds for xi . a0 xi built from
/// face values: sum_k xi_k^2 <a_k> and 1 / sum_k xi_k^2 <1/a_k>.
struct VoigtReuss {
    double harmonic;
    double arithmetic;
};
VoigtReuss voigt_reuss_bounds(const EdgeCoefficientField& a, const Direction& xi);

/// Cyclic shift of cell indices by `offset` (per direction): out[i + s] = in[i].
std::vector<double> cyclic_shift(const PeriodicGrid& grid, std::span<const double> cell_values,
                                 std::array<long, 2> offset);

} // namespace homog
