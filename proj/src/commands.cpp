#include "homog/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/parallel.hpp"
#include "homog/seed.hpp"
#include "homog/upscale.hpp"

namespace homog {

namespace fs = std::filesystem;

OutputFile::OutputFile(fs::path path) : path_(std::move(path)), partial_(path_)
{
    partial_ += ".partial";
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    out_.open(partial_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open " + partial_.string() + " for writing");
    out_.imbue(std::locale::classic());
}

void OutputFile::commit()
{
    if (committed_) return;
    out_.flush();
    if (!out_) throw IoError("write to " + partial_.string() + " failed");
    out_.close();
    fs::rename(partial_, path_);
    committed_ = true;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& output, const std::string& command, const RunConfig& config,
                    const std::string& started_at)
{
    nlohmann::json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    m["output"] = output.filename().string();
    m["config"] = config.source;
    m["master_seed"] = config.master_seed;
    m["started_at"] = started_at;
    m["finished_at"] = utc_timestamp();
    fs::path p = output;
    p += ".manifest.json";
    OutputFile f(p);
    f.stream() << m.dump(2) << '\n';
    f.commit();
}

namespace {

struct Run {
    const RunConfig& config;
    std::string command;
    std::string started = utc_timestamp();
    std::vector<fs::path> produced;

    Run(const RunConfig& c, std::string cmd) : config(c), command(std::move(cmd))
    {
        if (c.threads > 0) parallel::set_threads(c.threads);
        fs::create_directories(c.output);
    }

    fs::path path(const std::string& name) const { return config.output / name; }

    void finish(OutputFile& f)
    {
        f.commit();
        write_manifest(f.path(), command, config, started);
        produced.push_back(f.path());
    }
};

std::string fmt(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_double(x);
}

std::string xi_label(const Direction& xi)
{
    std::string s;
    for (int k = 0; k < xi.dim(); ++k) {
        if (k) s += ';';
        s += fmt(xi[k]);
    }
    return s;
}

EstimateConfig estimate_config(const RunConfig& c)
{
    EstimateConfig e;
    e.corrector.solver = c.solver;
    e.corrector.schedule = c.time;
    e.window = AveragingWindow{c.window};
    e.spectrum_threshold = c.spectrum_threshold;
    return e;
}

const FieldLaw& require_law(const RunConfig& c)
{
    if (!c.law) throw ValidationError("missing law section", "law");
    return *c.law;
}

std::vector<double> T_list_for(Method m, const RunConfig& c)
{
    if (m == Method::naive) return {kInfiniteTime};
    if (c.T_values.empty()) throw ValidationError("method " + to_string(m) + " needs T values", "T");
    return c.T_values;
}

void write_rate_row(std::ostream& os, const std::string& name, const MaskedRateFit& fit)
{
    std::size_t used = 0;
    for (bool u : fit.used) used += u ? 1 : 0;
    if (fit.fit)
        os << name << ',' << fmt(fit.fit->slope) << ',' << fmt(fit.fit->intercept) << ',' << fmt(fit.fit->r2) << ','
           << used << ',' << fit.status << '\n';
    else
        os << name << ",,,," << used << ',' << fit.status << '\n';
}

constexpr const char* kRateHeader = "name,slope,intercept,r2,points_used,status\n";

} // namespace

std::vector<fs::path> cmd_sample_field(const RunConfig& config)
{
    Run run(config, "sample-field");
    const FieldLaw& law = require_law(config);
    const PeriodicGrid grid = config.grid();
    const std::uint64_t seed = child_seed(config.master_seed, 0);
    const EdgeCoefficientField a = CoefficientSampler(grid, law, config.spectrum_threshold).sample(seed);

    FieldRecord rec;
    rec.grid = grid;
    rec.law = law_to_json(law).dump();
    rec.seed = seed;
    rec.arrays = static_cast<std::size_t>(grid.dim());
    rec.values = a.values;

    const fs::path out = run.path(config.field_format == FieldFormat::csv ? "field.csv" : "field.bin");
    fs::path partial = out;
    partial += ".partial";
    write_field(partial, rec, config.field_format);
    fs::rename(partial, out);
    write_manifest(out, run.command, config, run.started);
    run.produced.push_back(out);
    return run.produced;
}

std::vector<fs::path> cmd_estimate(const RunConfig& config)
{
    Run run(config, "estimate");
    const EstimateConfig ecfg = estimate_config(config);
    const auto xis = config.xi_list();

    std::optional<FieldRecord> fixed;
    if (config.field_file) {
        fixed = read_field(*config.field_file);
        if (fixed->grid.dim() != config.dimension)
            throw ValidationError("field file dimension does not match config", "field_file");
    } else {
        require_law(config);
    }
    const PeriodicGrid grid = fixed ? fixed->grid : config.grid();
    const double L = config.window == 0.0 ? grid.side() : config.window;

    OutputFile csv(run.path("estimates.csv"));
    auto& os = csv.stream();
    os << "method,d,N,R,L,T,xi,M,mean,variance,stderr,seed\n";

    for (Method m : config.methods) {
        for (double T : T_list_for(m, config)) {
            for (const Direction& xi : xis) {
                double mean = 0.0, var = 0.0, se = 0.0;
                std::size_t M = 1;
                std::uint64_t seed = config.master_seed;
                if (fixed) {
                    const EdgeCoefficientField a = fixed->coefficients();
                    mean = estimate_one(a, m, xi, T, ecfg);
                    seed = fixed->seed;
                } else {
                    const UpscaleEstimate e =
                        monte_carlo(*config.law, grid, m, xi, T, config.realizations, config.master_seed, ecfg);
                    mean = e.mean;
                    var = e.sample_variance;
                    se = e.std_error;
                    M = e.samples;
                }
                os << to_string(m) << ',' << grid.dim() << ',' << grid.cells() << ',' << fmt(grid.side()) << ','
                   << fmt(L) << ',' << fmt(T) << ',' << xi_label(xi) << ',' << M << ',' << fmt(mean) << ','
                   << fmt(var) << ',' << fmt(se) << ',' << seed << '\n';

                if (config.export_solutions) {
                    const EdgeCoefficientField a = fixed ? fixed->coefficients()
                                                         : CoefficientSampler(grid, *config.law, config.spectrum_threshold)
                                                               .sample(child_seed(config.master_seed, 0));
                    const CorrectorSolution s = solve_corrector(m, a, xi, T, ecfg.corrector);
                    FieldRecord rec;
                    rec.grid = grid;
                    rec.kind = "corrector";
                    rec.law = nlohmann::json{{"method", to_string(m)},
                                             {"T", std::isinf(T) ? nlohmann::json("inf") : nlohmann::json(T)},
                                             {"xi", xi_label(xi)},
                                             {"iterations", s.report.iterations},
                                             {"residual_norm", s.residual_norm},
                                             {"converged", s.report.converged}}
                                  .dump();
                    rec.seed = fixed ? fixed->seed : child_seed(config.master_seed, 0);
                    rec.arrays = 1;
                    rec.values = s.chi.values;
                    std::string name = "chi_" + to_string(m) + (std::isinf(T) ? "" : "_T" + fmt(T)) + "_xi" +
                                       std::to_string(&xi - xis.data()) + ".csv";
                    const fs::path out = run.path(name);
                    fs::path partial = out;
                    partial += ".partial";
                    write_field(partial, rec, FieldFormat::csv);
                    fs::rename(partial, out);
                    write_manifest(out, run.command, config, run.started);
                    run.produced.push_back(out);
                }
            }
        }
    }
    run.finish(csv);

    if (config.polarization) {
        if (grid.dim() != 2) throw ValidationError("tensor recovery needs dimension 2", "polarization");
        OutputFile tcsv(run.path("tensor.csv"));
        auto& ts = tcsv.stream();
        ts << "method,T,M,a11,a12,a21,a22\n";
        for (Method m : config.methods) {
            for (double T : T_list_for(m, config)) {
                std::array<double, 4> t{};
                std::size_t M = 1;
                if (fixed) {
                    t = estimate_tensor(fixed->coefficients(), m, T, ecfg);
                } else {
                    const double c = 1.0 / std::sqrt(2.0);
                    const auto& law = *config.law;
                    const std::size_t n = config.realizations;
                    const double a11 = monte_carlo(law, grid, m, Direction::axis(2, 0), T, n, config.master_seed, ecfg).mean;
                    const double a22 = monte_carlo(law, grid, m, Direction::axis(2, 1), T, n, config.master_seed, ecfg).mean;
                    const double q = monte_carlo(law, grid, m, Direction{c, c}, T, n, config.master_seed, ecfg).mean;
                    const double a12 = q - 0.5 * (a11 + a22);
                    t = {a11, a12, a12, a22};
                    M = n;
                }
                ts << to_string(m) << ',' << fmt(T) << ',' << M << ',' << fmt(t[0]) << ',' << fmt(t[1]) << ','
                   << fmt(t[2]) << ',' << fmt(t[3]) << '\n';
            }
        }
        run.finish(tcsv);
    }
    return run.produced;
}

std::vector<fs::path> cmd_rate_study(const RunConfig& config)
{
    Run run(config, "rate-study");
    std::vector<double> Ts = config.T_values;
    if (Ts.empty()) Ts = {8.0, 16.0, 32.0, 64.0, 128.0};

    std::vector<SystematicErrorRow> rows;
    if (config.synthetic_exponent) {
        std::sort(Ts.begin(), Ts.end());
        for (double T : Ts) {
            SystematicErrorRow r;
            r.T = T;
            r.err_sys = std::pow(T, *config.synthetic_exponent);
            r.above_noise_floor = r.err_sys > 0.0;
            rows.push_back(r);
        }
    } else {
        const FieldLaw& law = require_law(config);
        const auto xis = config.xi_list();
        const PairedStudy study = paired_systematic_error(law, config.grid(), xis.front(), Ts, config.realizations,
                                                          config.master_seed, estimate_config(config),
                                                          config.rate_method);
        rows = study.rows;
    }
    const MaskedRateFit fit = fit_above_noise_floor(rows);

    OutputFile sys(run.path("systematic_error.csv"));
    sys.stream() << "T,err_sys,stderr,mean_estimate,stderr_estimate,used_in_fit\n";
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& r = rows[j];
        sys.stream() << fmt(r.T) << ',' << fmt(r.err_sys) << ',' << fmt(r.std_error) << ',' << fmt(r.mean_estimate)
                     << ',' << fmt(r.stderr_estimate) << ',' << (fit.used[j] ? 1 : 0) << '\n';
    }
    run.finish(sys);

    OutputFile rf(run.path("rate_fit.csv"));
    rf.stream() << kRateHeader;
    write_rate_row(rf.stream(), "err_sys", fit);
    run.finish(rf);
    return run.produced;
}

std::vector<fs::path> cmd_decay_study(const RunConfig& config)
{
    Run run(config, "decay-study");
    const FieldLaw& law = require_law(config);
    const auto xis = config.xi_list();
    const DecayStudy study = decay_study(law, config.grid(), xis.front(), config.decay_T, config.realizations,
                                         config.master_seed, estimate_config(config));

    OutputFile csv(run.path("decay.csv"));
    csv.stream() << "t,mean_u,rms_u,rms_grad_u,stderr_u2,stderr_gradu2,point_mean_u,point_stderr_u\n";
    for (const auto& r : study.rows)
        csv.stream() << fmt(r.t) << ',' << fmt(r.mean_u) << ',' << fmt(r.rms_u) << ',' << fmt(r.rms_grad_u) << ','
                     << fmt(r.stderr_u2) << ',' << fmt(r.stderr_grad_u2) << ',' << fmt(r.point_mean_u) << ','
                     << fmt(r.point_stderr_u) << '\n';
    run.finish(csv);

    const auto [lo, hi] = config.decay_fit_window;
    OutputFile fit(run.path("decay_fit.csv"));
    fit.stream() << kRateHeader;
    write_rate_row(fit.stream(), "rms_u", fit_decay(study.rows, DecayColumn::rms_u, lo, hi));
    write_rate_row(fit.stream(), "rms_grad_u", fit_decay(study.rows, DecayColumn::rms_grad_u, lo, hi));
    run.finish(fit);
    return run.produced;
}

std::vector<fs::path> cmd_sweep(const RunConfig& config)
{
    Run run(config, "sweep");
    const FieldLaw& law = require_law(config);
    std::vector<std::size_t> cells = config.sweep_cells;
    if (cells.empty()) cells = {config.cells};
    if (config.T_values.empty()) throw ValidationError("sweep needs T values", "T");
    const SweepResult res = sweep_T_vs_R(law, config.dimension, cells, config.spacing, config.T_values,
                                         config.realizations, config.master_seed, estimate_config(config));

    OutputFile csv(run.path("sweep.csv"));
    csv.stream() << "R,T,err_sys,err_stat,M\n";
    for (const auto& r : res.rows)
        csv.stream() << fmt(r.R) << ',' << fmt(r.T) << ',' << fmt(r.err_sys) << ',' << fmt(r.err_stat) << ','
                     << r.samples << '\n';
    run.finish(csv);

    OutputFile opt(run.path("sweep_optimal.csv"));
    opt.stream() << "R,T_opt\n";
    for (const auto& [R, T] : res.optimal_T) opt.stream() << fmt(R) << ',' << fmt(T) << '\n';
    run.finish(opt);
    return run.produced;
}

} // namespace homog
