#include "homog/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "homog/errors.hpp"
#include "homog/fft.hpp"
#include "homog/seed.hpp"

namespace homog {

void CovarianceSpec::validate() const
{
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw ValidationError("variance must be positive", "law.covariance.variance");
    if (!(correlation_length > 0.0) || !std::isfinite(correlation_length))
        throw ValidationError("correlation length must be positive", "law.covariance.correlation_length");
}

double covariance_eval(const CovarianceSpec& spec, std::span<const double> lag)
{
    double r2 = 0.0;
    for (double x : lag) r2 += x * x;
    const double l = spec.correlation_length;
    switch (spec.kind) {
    case CovarianceKind::exponential: return spec.variance * std::exp(-std::sqrt(r2) / l);
    case CovarianceKind::gaussian: return spec.variance * std::exp(-r2 / (l * l));
    }
    return 0.0;
}

double periodized_covariance(const CovarianceSpec& spec, const PeriodicGrid& grid, std::span<const double> lag)
{
    // Images beyond this distance contribute below double precision.
    const double cutoff = spec.kind == CovarianceKind::exponential ? 38.0 * spec.correlation_length
                                                                   : 6.5 * spec.correlation_length;
    const double r = grid.side();
    const long k = static_cast<long>(std::ceil(cutoff / r)) + 1;
    double sum = 0.0;
    std::array<double, 2> shifted{0.0, 0.0};
    const std::size_t d = lag.size();
    for (long n1 = (d == 2 ? -k : 0); n1 <= (d == 2 ? k : 0); ++n1) {
        for (long n0 = -k; n0 <= k; ++n0) {
            shifted[0] = lag[0] + r * static_cast<double>(n0);
            if (d == 2) shifted[1] = lag[1] + r * static_cast<double>(n1);
            sum += covariance_eval(spec, std::span<const double>(shifted.data(), d));
        }
    }
    return sum;
}

FieldLaw FieldLaw::constant(double value)
{
    FieldLaw law;
    law.kind = LawKind::constant;
    law.bounds = std::pair{value, value};
    return law;
}

FieldLaw FieldLaw::lognormal(double mu, CovarianceSpec cov)
{
    FieldLaw law;
    law.kind = LawKind::lognormal;
    law.gaussian_mean = mu;
    law.covariance = cov;
    return law;
}

FieldLaw FieldLaw::logitnormal(double mu, CovarianceSpec cov, double alpha, double beta)
{
    FieldLaw law;
    law.kind = LawKind::logitnormal;
    law.gaussian_mean = mu;
    law.covariance = cov;
    law.bounds = std::pair{alpha, beta};
    return law;
}

FieldLaw FieldLaw::two_phase(double alpha, double beta, std::optional<CovarianceSpec> cov)
{
    FieldLaw law;
    law.kind = LawKind::two_phase;
    law.covariance = cov;
    law.bounds = std::pair{alpha, beta};
    return law;
}

void FieldLaw::validate() const
{
    if (!std::isfinite(gaussian_mean)) throw ValidationError("must be finite", "law.gaussian_mean");
    auto check_pair = [](const std::pair<double, double>& p, const char* name) {
        if (!(p.first > 0.0) || !std::isfinite(p.second))
            throw ValidationError("lower bound must be positive and both finite", name);
        if (p.first > p.second)
            throw ValidationError("lower bound " + std::to_string(p.first) + " exceeds upper bound " +
                                      std::to_string(p.second),
                                  name);
    };
    switch (kind) {
    case LawKind::constant:
        if (!bounds) throw ValidationError("constant law needs a value", "law.value");
        check_pair(*bounds, "law.value");
        if (bounds->first != bounds->second) throw ValidationError("constant law needs alpha == beta", "law.bounds");
        break;
    case LawKind::two_phase:
        if (!bounds) throw ValidationError("two_phase law needs bounds", "law.bounds");
        check_pair(*bounds, "law.bounds");
        if (covariance) covariance->validate();
        break;
    case LawKind::logitnormal:
        if (!bounds) throw ValidationError("logitnormal law needs bounds", "law.bounds");
        check_pair(*bounds, "law.bounds");
        if (!covariance) throw ValidationError("logitnormal law needs a covariance", "law.covariance");
        covariance->validate();
        break;
    case LawKind::lognormal:
        if (!covariance) throw ValidationError("lognormal law needs a covariance", "law.covariance");
        covariance->validate();
        if (clamp) check_pair(*clamp, "law.clamp");
        break;
    }
}

std::optional<std::pair<double, double>> FieldLaw::range() const
{
    if (kind == LawKind::lognormal) return clamp;
    return bounds;
}

std::string to_string(LawKind kind)
{
    switch (kind) {
    case LawKind::constant: return "constant";
    case LawKind::two_phase: return "two_phase";
    case LawKind::lognormal: return "lognormal";
    case LawKind::logitnormal: return "logitnormal";
    }
    return "?";
}

std::string to_string(CovarianceKind kind)
{
    return kind == CovarianceKind::exponential ? "exponential" : "gaussian";
}

std::array<double, 2> Lattice::site(const PeriodicGrid& grid, std::size_t idx) const
{
    const auto c = grid.coords(idx);
    const double h = grid.spacing();
    std::array<double, 2> x{-0.5 * grid.side() + (static_cast<double>(c[0]) + 0.5) * h,
                            grid.dim() == 2 ? -0.5 * grid.side() + (static_cast<double>(c[1]) + 0.5) * h : 0.0};
    if (face_direction >= 0) x[static_cast<std::size_t>(face_direction)] += 0.5 * h;
    return x;
}

GaussianSampler::GaussianSampler(const PeriodicGrid& grid, const CovarianceSpec& spec, double threshold)
    : grid_(grid)
{
    spec.validate();
    const std::size_t n = grid.cells();
    const double h = grid.spacing();
    std::vector<double> first_row(grid.size());
    std::array<double, 2> lag{0.0, 0.0};
    const auto d = static_cast<std::size_t>(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = grid.coords(i);
        lag = {h * static_cast<double>(c[0]), h * static_cast<double>(c[1])};
        first_row[i] = periodized_covariance(spec, grid, std::span<const double>(lag.data(), d));
    }

    RealFft fft(grid);
    std::vector<std::complex<double>> spectrum(fft.spectrum_size());
    fft.forward(first_row, spectrum);

    const std::size_t cols = fft.spectrum_columns();
    eigenvalues_.resize(spectrum.size());
    sqrt_eigenvalues_.resize(spectrum.size());
    double negative = 0.0, total = 0.0;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        const double lambda = spectrum[j].real();
        const std::size_t col = j % cols;
        // Half-spectrum columns other than 0 and N/2 stand for two eigenvalues.
        const double weight = (col == 0 || (n % 2 == 0 && col == n / 2)) ? 1.0 : 2.0;
        total += weight * std::abs(lambda);
        if (lambda < 0.0) negative += weight * -lambda;
        eigenvalues_[j] = std::max(lambda, 0.0);
        sqrt_eigenvalues_[j] = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    }
    clipped_fraction_ = total > 0.0 ? negative / total : 0.0;
    if (clipped_fraction_ > threshold)
        throw SpectrumError("circulant embedding clipped " + std::to_string(clipped_fraction_) +
                            " of the spectrum (threshold " + std::to_string(threshold) + ")");
}

std::vector<double> GaussianSampler::sample(std::uint64_t seed) const
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> field(grid_.size());
    for (double& w : field) w = normal(rng);

    RealFft fft(grid_);
    std::vector<std::complex<double>> spectrum(fft.spectrum_size());
    fft.forward(field, spectrum);
    for (std::size_t j = 0; j < spectrum.size(); ++j) spectrum[j] *= sqrt_eigenvalues_[j];
    fft.inverse(spectrum, field);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (double& x : field) x *= scale;
    return field;
}

std::vector<double> sample_gaussian(const PeriodicGrid& grid, const CovarianceSpec& spec, Lattice lattice,
                                    std::uint64_t seed, double threshold)
{
    if (lattice.face_direction >= grid.dim()) throw ValidationError("face direction out of range", "lattice");
    return GaussianSampler(grid, spec, threshold).sample(seed);
}

namespace {

double sigmoid(double z)
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

double transform_value(double g, const FieldLaw& law)
{
    switch (law.kind) {
    case LawKind::constant: return law.bounds->first;
    case LawKind::two_phase: return g < 0.0 ? law.bounds->first : law.bounds->second;
    case LawKind::logitnormal: {
        const auto [lo, hi] = *law.bounds;
        return std::clamp(lo + (hi - lo) * sigmoid(law.gaussian_mean + g), lo, hi);
    }
    case LawKind::lognormal: {
        // exp overflows past ~709.78 and underflows to zero below ~-745.
        const double z = std::clamp(law.gaussian_mean + g, -700.0, 700.0);
        const double v = std::exp(z);
        return law.clamp ? std::clamp(v, law.clamp->first, law.clamp->second) : v;
    }
    }
    return 0.0;
}

void transform(std::span<double> g, const FieldLaw& law)
{
    for (double& x : g) x = transform_value(x, law);
}

CoefficientSampler::CoefficientSampler(const PeriodicGrid& grid, FieldLaw law, double threshold)
    : grid_(grid), law_(std::move(law))
{
    law_.validate();
    if (law_.kind != LawKind::constant && law_.covariance) gaussian_.emplace(grid_, *law_.covariance, threshold);
}

EdgeCoefficientField CoefficientSampler::sample(std::uint64_t seed) const
{
    if (law_.kind == LawKind::constant)
        return EdgeCoefficientField(grid_, law_.bounds->first);

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid_.dim()) * grid_.size());
    for (int k = 0; k < grid_.dim(); ++k) {
        const std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(k));
        std::vector<double> g;
        if (gaussian_) {
            g = gaussian_->sample(s);
        } else {
            std::mt19937_64 rng(s);
            std::normal_distribution<double> normal;
            g.resize(grid_.size());
            for (double& x : g) x = normal(rng);
        }
        transform(g, law_);
        values.insert(values.end(), g.begin(), g.end());
    }
    return make_coefficients(grid_, std::move(values));
}

EdgeCoefficientField sample_edge_coefficients(const PeriodicGrid& grid, const FieldLaw& law, std::uint64_t seed)
{
    return CoefficientSampler(grid, law).sample(seed);
}

} // namespace homog
