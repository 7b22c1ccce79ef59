#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "homog/corrector.hpp"
#include "homog/field.hpp"
#include "homog/field_io.hpp"
#include "homog/krylov.hpp"
#include "homog/parabolic.hpp"

namespace homog {

/// Experiment configuration. JSON keys (all optional unless noted):
///
///   dimension, cells, spacing, law (required unless field_file),
///   methods, T, window, directions, realizations, master_seed,
///   solver {tol, maxit, preconditioner, backend},
///   time {scheme, dt0, fraction, growth},
///   output, threads, field_file, field_format, polarization,
///   export_solutions, spectrum_threshold,
///   rate {method, synthetic_exponent}, decay {T, fit_window}, sweep {cells}
///
/// law: {kind, value | gaussian_mean, covariance {kind, variance,
/// correlation_length}, bounds [alpha, beta], clamp [lo, hi]}.
/// Unknown keys are rejected.
struct RunConfig {
    int dimension = 1;
    std::size_t cells = 256;
    double spacing = 1.0;
    std::optional<FieldLaw> law;
    std::vector<Method> methods{Method::naive};
    std::vector<double> T_values;
    double window = 0.0;
    std::vector<std::vector<double>> directions;
    std::size_t realizations = 1;
    std::uint64_t master_seed = 0;
    SolverConfig solver;
    ScheduleParams time;
    std::filesystem::path output = "out";
    int threads = 0;
    std::optional<std::filesystem::path> field_file;
    FieldFormat field_format = FieldFormat::csv;
    bool polarization = false;
    bool export_solutions = false;
    double spectrum_threshold = kDefaultSpectrumThreshold;

    Method rate_method = Method::modified;
    std::optional<double> synthetic_exponent;

    double decay_T = 64.0;
    std::pair<double, double> decay_fit_window{4.0, 64.0};

    std::vector<std::size_t> sweep_cells;

    /// The resolved document the config was parsed from (for manifests).
    nlohmann::json source;

    PeriodicGrid grid() const { return PeriodicGrid::with_spacing(dimension, cells, spacing); }
    std::vector<Direction> xi_list() const;
};

/// Parses and validates; throws ValidationError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);

/// Overlays environment variables on `doc`: HOMOG_<KEY>=<value> sets the
/// top-level key <key> (lower case); a double underscore descends into an
/// object (HOMOG_SOLVER__TOL sets solver.tol). Values are parsed as JSON and
/// fall back to plain strings. `environ_entries` are "NAME=value" strings.
nlohmann::json apply_env_overrides(nlohmann::json doc, const std::vector<std::string>& environ_entries);

nlohmann::json law_to_json(const FieldLaw& law);
FieldLaw law_from_json(const nlohmann::json& j);

} // namespace homog
