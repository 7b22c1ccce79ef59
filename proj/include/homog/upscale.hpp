#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homog/corrector.hpp"
#include "homog/field.hpp"
#include "homog/grid.hpp"

namespace homog {

struct EstimateConfig {
    CorrectorConfig corrector;
    AveragingWindow window;
    double spectrum_threshold = kDefaultSpectrumThreshold;
};

/// xi . a^{0,T} xi on one realization: solves the corrector and averages the
/// face energy over the window.
double estimate_one(const EdgeCoefficientField& a, Method method, const Direction& xi, double T,
                    const EstimateConfig& config = {});

/// Full 2x2 effective tensor from xi = e1, e2 and the polarization direction
/// (e1 + e2)/sqrt(2). Row-major {a11, a12, a21, a22}.
std::array<double, 4> estimate_tensor(const EdgeCoefficientField& a, Method method, double T,
                                      const EstimateConfig& config = {});

struct UpscaleEstimate {
    Method method = Method::naive;
    double T = kInfiniteTime;
    PeriodicGrid grid;
    double window_side = 0.0;
    Direction xi{1.0};
    std::size_t samples = 0;
    double mean = 0.0;
    double sample_variance = 0.0;
    double std_error = 0.0;
    std::uint64_t master_seed = 0;
    /// Per-realization values and their Voigt-Reuss brackets.
    std::vector<double> values;
    std::vector<VoigtReuss> brackets;
    std::size_t bracket_violations = 0;
};

/// Realization i is drawn with child_seed(master_seed, i). Results do not
/// depend on the number of threads.
UpscaleEstimate monte_carlo(const FieldLaw& law, const PeriodicGrid& grid, Method method, const Direction& xi,
                            double T, std::size_t samples, std::uint64_t master_seed, const EstimateConfig& config = {});

/// True when `value` lies in [harmonic, arithmetic] up to relative slack.
bool within_bracket(double value, const VoigtReuss& b, double slack = 1e-9);

struct SystematicErrorRow {
    double T = 0.0;
    double err_sys = 0.0;          // |mean_i (est_T(a_i) - est_naive(a_i))|
    double std_error = 0.0;           // of that mean difference
    double mean_estimate = 0.0;    // mean_i est_T(a_i)
    double stderr_estimate = 0.0;
    bool above_noise_floor = false; // err_sys >= 2 std_error and err_sys > 0
};

struct PairedStudy {
    std::vector<SystematicErrorRow> rows;
    std::size_t samples = 0;
    double reference_mean = 0.0;    // naive
    double reference_stderr = 0.0;
    std::size_t bracket_violations = 0;
};

/// Common-random-numbers estimate of the T-truncation bias: every realization
/// is solved with the naive method and with `method` at each T (one parabolic
/// run per realization passing through all T). `method` is modified or
/// modified_quadrature.
PairedStudy paired_systematic_error(const FieldLaw& law, const PeriodicGrid& grid, const Direction& xi,
                                    std::span<const double> T_values, std::size_t samples,
                                    std::uint64_t master_seed, const EstimateConfig& config = {},
                                    Method method = Method::modified);

struct RateFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares line through (log x, log y). Needs >= 2 points, y > 0.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct MaskedRateFit {
    std::optional<RateFit> fit;
    std::vector<bool> used;
    std::string status; // "ok", "all points at noise floor", "too few points above noise floor"
};

/// Fits err_sys(T) over the rows above the noise floor.
MaskedRateFit fit_above_noise_floor(std::span<const SystematicErrorRow> rows);

struct SweepRow {
    double R = 0.0;
    std::size_t N = 0;
    double T = 0.0;
    double err_sys = 0.0;
    double err_stat = 0.0;   // std_error of the T-estimate
    double stderr_sys = 0.0;
    std::size_t samples = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Per R: smallest T whose err_sys is within 2 err_stat of the best T.
    std::vector<std::pair<double, double>> optimal_T;
};

struct DecayStudy {
    std::vector<DecayRow> rows;
    std::size_t samples = 0;
};

/// Ensemble of parabolic runs from f0 = div(a xi) up to T on the geometric
/// schedule; realization i uses child_seed(master_seed, i).
DecayStudy decay_study(const FieldLaw& law, const PeriodicGrid& grid, const Direction& xi, double T,
                       std::size_t samples, std::uint64_t master_seed, const EstimateConfig& config = {});

enum class DecayColumn { rms_u, rms_grad_u };

/// Log-log fit of a decay column over records with t in [t_lo, t_hi] and a
/// positive value.
MaskedRateFit fit_decay(std::span<const DecayRow> rows, DecayColumn column, double t_lo, double t_hi);

SweepResult sweep_T_vs_R(const FieldLaw& law, int dim, std::span<const std::size_t> cells, double spacing,
                         std::span<const double> T_values, std::size_t samples, std::uint64_t master_seed,
                         const EstimateConfig& config = {});

} // namespace homog
