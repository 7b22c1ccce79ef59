#include "homog/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "homog/errors.hpp"

namespace homog {
namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

RealFft::RealFft(const PeriodicGrid& grid)
    : grid_(grid), columns_(grid.cells() / 2 + 1)
{
    const int n = static_cast<int>(grid.cells());
    spectrum_size_ = grid.dim() == 1 ? columns_ : grid.cells() * columns_;
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_ = fftw_alloc_real(grid.size());
    auto* spec = fftw_alloc_complex(spectrum_size_);
    spec_ = spec;
    if (!real_ || !spec) throw Error("FFT buffer allocation failed");
    if (grid.dim() == 1) {
        forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
        inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
    } else {
        forward_plan_ = fftw_plan_dft_r2c_2d(n, n, real_, spec, FFTW_ESTIMATE);
        inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, spec, real_, FFTW_ESTIMATE);
    }
    if (!forward_plan_ || !inverse_plan_) throw Error("FFT planning failed");
}

RealFft::~RealFft()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    fftw_free(real_);
    fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out)
{
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::memcpy(static_cast<void*>(out.data()), spec_, spectrum_size_ * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out)
{
    // c2r destroys its input, so it always works on the internal copy.
    std::memcpy(spec_, static_cast<const void*>(in.data()), spectrum_size_ * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(real_, real_ + grid_.size(), out.begin());
}

} // namespace homog
