#include "homog/kernels_reference.hpp"

#include "homog/errors.hpp"
#include "homog/summation.hpp"

namespace homog::reference {

FaceField gradient(const CellField& v)
{
    const PeriodicGrid& g = v.grid;
    FaceField out(g);
    for (int k = 0; k < g.dim(); ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            out.direction(k)[i] = (v.values[g.neighbor(i, k, 1)] - v.values[i]) / g.spacing();
    return out;
}

CellField divergence(const FaceField& f)
{
    const PeriodicGrid& g = f.grid;
    CellField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < g.dim(); ++k) acc += (f.direction(k)[i] - f.direction(k)[g.neighbor(i, k, -1)]) / g.spacing();
        out.values[i] = acc;
    }
    return out;
}

CellField apply_A(const EdgeCoefficientField& a, const CellField& v)
{
    FaceField flux = reference::gradient(v);
    for (std::size_t j = 0; j < flux.values.size(); ++j) flux.values[j] *= a.values[j];
    CellField out = reference::divergence(flux);
    for (double& x : out.values) x = -x;
    return out;
}

CellField assemble_f0(const EdgeCoefficientField& a, const Direction& xi)
{
    FaceField flux(a.grid);
    for (int k = 0; k < a.grid.dim(); ++k)
        for (std::size_t i = 0; i < a.grid.size(); ++i) flux.direction(k)[i] = a.direction(k)[i] * xi[k];
    return reference::divergence(flux);
}

double face_energy_average(const EdgeCoefficientField& a, const FaceField& grad_chi, const Direction& xi,
                           const AveragingWindow& window)
{
    const PeriodicGrid& g = a.grid;
    const std::size_t nl = window.cells(g);
    const std::size_t start = (g.cells() - nl) / 2;
    KahanSum sum;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.coords(i);
        bool inside = c[0] >= start && c[0] < start + nl;
        if (g.dim() == 2) inside = inside && c[1] >= start && c[1] < start + nl;
        if (!inside) continue;
        ++count;
        for (int k = 0; k < g.dim(); ++k) {
            const double e = grad_chi.direction(k)[i] + xi[k];
            sum.add(a.direction(k)[i] * e * e);
        }
    }
    return sum.value() / static_cast<double>(count);
}

} // namespace homog::reference
