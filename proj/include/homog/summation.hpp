#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "homog/parallel.hpp"

namespace homog {

/// Neumaier-compensated accumulator.
class KahanSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_sum(std::span<const double> xs) noexcept
{
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

namespace detail {

// Fixed block size: the block partition, and therefore the result, does not
// depend on the number of threads.
inline constexpr std::size_t kReduceBlock = 4096;

template <class Term>
double blocked_reduce(std::size_t n, Term term)
{
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    if (nblocks <= 1) {
        KahanSum s;
        for (std::size_t i = 0; i < n; ++i) s.add(term(i));
        return s.value();
    }
    std::vector<double> partial(nblocks);
    const auto nb = static_cast<long>(nblocks);
#pragma omp parallel for schedule(static) if (n >= parallel::kMinParallelWork)
    for (long b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        KahanSum s;
        for (std::size_t i = lo; i < hi; ++i) s.add(term(i));
        partial[static_cast<std::size_t>(b)] = s.value();
    }
    return kahan_sum(partial);
}

} // namespace detail

/// Deterministic sum: identical bits for any thread count.
inline double reduce_sum(std::span<const double> x)
{
    return detail::blocked_reduce(x.size(), [x](std::size_t i) { return x[i]; });
}

inline double dot(std::span<const double> x, std::span<const double> y)
{
    return detail::blocked_reduce(x.size(), [x, y](std::size_t i) { return x[i] * y[i]; });
}

inline double mean(std::span<const double> x)
{
    return x.empty() ? 0.0 : reduce_sum(x) / static_cast<double>(x.size());
}

} // namespace homog
