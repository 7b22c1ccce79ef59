#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "homog/grid.hpp"

namespace homog {

/// Real-to-half-complex FFT over all cells of a periodic grid (FFTW backed).
/// Spectrum layout: 1D has N/2+1 entries; 2D is N rows (direction 1) by
/// N/2+1 columns (direction 0). Inverse is unnormalized. An instance owns its
/// buffers and must not be used by two threads at once.
class RealFft {
public:
    explicit RealFft(const PeriodicGrid& grid);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t spectrum_size() const noexcept { return spectrum_size_; }
    std::size_t spectrum_columns() const noexcept { return columns_; }

    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    PeriodicGrid grid_;
    std::size_t spectrum_size_;
    std::size_t columns_;
    double* real_ = nullptr;
    void* spec_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

} // namespace homog
