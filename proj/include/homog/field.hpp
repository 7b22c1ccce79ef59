#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

enum class CovarianceKind { exponential, gaussian };

/// Stationary isotropic covariance. exponential: s2 exp(-|x|/l);
/// gaussian: s2 exp(-|x|^2/l^2).
struct CovarianceSpec {
    CovarianceKind kind = CovarianceKind::exponential;
    double variance = 1.0;
    double correlation_length = 1.0;

    void validate() const;
};

double covariance_eval(const CovarianceSpec& spec, std::span<const double> lag);

/// Sum of the covariance over all periodic images of `lag`, i.e. the
/// covariance of the field on the torus of side R.
double periodized_covariance(const CovarianceSpec& spec, const PeriodicGrid& grid, std::span<const double> lag);

enum class LawKind { constant, two_phase, lognormal, logitnormal };

/// Pointwise law of the coefficient. lognormal: exp(mu + g), optionally
/// clamped. logitnormal: alpha + (beta - alpha) sigmoid(mu + g).
/// two_phase: alpha where g < 0, beta otherwise; without a covariance, g is
/// white noise (independent faces). constant: alpha everywhere.
struct FieldLaw {
    LawKind kind = LawKind::constant;
    double gaussian_mean = 0.0;
    std::optional<CovarianceSpec> covariance;
    std::optional<std::pair<double, double>> bounds;
    std::optional<std::pair<double, double>> clamp;

    static FieldLaw constant(double value);
    static FieldLaw lognormal(double mu, CovarianceSpec cov);
    static FieldLaw logitnormal(double mu, CovarianceSpec cov, double alpha, double beta);
    static FieldLaw two_phase(double alpha, double beta, std::optional<CovarianceSpec> cov = std::nullopt);

    /// Throws ValidationError naming the offending field.
    void validate() const;
    bool is_bounded() const noexcept { return kind != LawKind::lognormal || clamp.has_value(); }
    /// Range every sampled value lies in, when the law has one.
    std::optional<std::pair<double, double>> range() const;
};

std::string to_string(LawKind kind);
std::string to_string(CovarianceKind kind);

/// Site lattice of a sampled field: cell centers, or the face centers of one
/// direction (offset by h/2 along it). On a periodic lattice the offset does
/// not change the law, only the site positions.
struct Lattice {
    int face_direction = -1;

    static Lattice cell_centers() { return {}; }
    static Lattice face_centers(int k) { return {k}; }
    std::array<double, 2> site(const PeriodicGrid& grid, std::size_t idx) const;
};

inline constexpr double kDefaultSpectrumThreshold = 1e-6;

/// Circulant-embedding sampler for a stationary Gaussian field on the
/// periodic grid. Eigenvalues are computed once; negative ones are clipped
/// to zero and sampling is refused when the clipped share of the spectrum's
/// absolute energy exceeds `threshold`.
class GaussianSampler {
public:
    GaussianSampler(const PeriodicGrid& grid, const CovarianceSpec& spec,
                    double threshold = kDefaultSpectrumThreshold);

    /// Mean-zero draw; a deterministic function of the seed. Thread safe.
    std::vector<double> sample(std::uint64_t seed) const;

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double clipped_fraction() const noexcept { return clipped_fraction_; }

private:
    PeriodicGrid grid_;
    std::vector<double> eigenvalues_;
    std::vector<double> sqrt_eigenvalues_;
    double clipped_fraction_ = 0.0;
};

std::vector<double> sample_gaussian(const PeriodicGrid& grid, const CovarianceSpec& spec, Lattice lattice,
                                    std::uint64_t seed, double threshold = kDefaultSpectrumThreshold);

double transform_value(double g, const FieldLaw& law);
/// Applies the law pointwise, in place.
void transform(std::span<double> g, const FieldLaw& law);

/// Samples coefficients for repeated draws of one (grid, law) pair.
/// Direction k is drawn on the face-centered lattice of k with seed
/// child_seed(seed, k).
class CoefficientSampler {
public:
    CoefficientSampler(const PeriodicGrid& grid, FieldLaw law, double threshold = kDefaultSpectrumThreshold);

    EdgeCoefficientField sample(std::uint64_t seed) const;

    const PeriodicGrid& grid() const noexcept { return grid_; }
    const FieldLaw& law() const noexcept { return law_; }

private:
    PeriodicGrid grid_;
    FieldLaw law_;
    std::optional<GaussianSampler> gaussian_;
};

EdgeCoefficientField sample_edge_coefficients(const PeriodicGrid& grid, const FieldLaw& law, std::uint64_t seed);

} // namespace homog
