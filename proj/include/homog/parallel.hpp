#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace homog::parallel {

inline int max_threads()
{
#if defined(_OPENMP)
    return ::omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n)
{
#if defined(_OPENMP)
    if (n > 0) ::omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline bool in_parallel()
{
#if defined(_OPENMP)
    return ::omp_in_parallel();
#else
    return false;
#endif
}

// Below this many cells a kernel runs serially; thread start-up dominates.
inline constexpr std::size_t kMinParallelWork = 1u << 14;

/// Collects the first exception thrown inside an OpenMP region so it can be
/// rethrown on the calling thread after the region ends.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept
    {
        try {
            f();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }

    bool failed() const
    {
        std::lock_guard<std::mutex> lock(mutex_);
        return static_cast<bool>(error_);
    }

    void rethrow() const
    {
        if (error_) std::rethrow_exception(error_);
    }

private:
    mutable std::mutex mutex_;
    std::exception_ptr error_;
};

} // namespace homog::parallel
