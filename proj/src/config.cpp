#include "homog/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "homog/errors.hpp"

namespace homog {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix)
{
    if (!obj.is_object()) throw ValidationError("must be an object", prefix.empty() ? "config" : prefix);
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ValidationError("unknown key", prefix.empty() ? key : prefix + "." + key);
    }
}

double get_number(const json& j, const std::string& name)
{
    if (!j.is_number()) throw ValidationError("must be a number", name);
    return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& name)
{
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw ValidationError("must be an integer", name);
    const auto v = j.get<long long>();
    if (v < 0) throw ValidationError("must be nonnegative", name);
    return static_cast<std::size_t>(v);
}

std::pair<double, double> get_pair(const json& j, const std::string& name)
{
    if (!j.is_array() || j.size() != 2) throw ValidationError("must be a two-element array", name);
    return {get_number(j[0], name), get_number(j[1], name)};
}

std::vector<double> get_numbers(const json& j, const std::string& name)
{
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw ValidationError("must be a number or an array of numbers", name);
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_number(v, name));
    return out;
}

std::string get_string(const json& j, const std::string& name)
{
    if (!j.is_string()) throw ValidationError("must be a string", name);
    return j.get<std::string>();
}

CovarianceSpec covariance_from_json(const json& j)
{
    reject_unknown(j, {"kind", "variance", "correlation_length"}, "law.covariance");
    CovarianceSpec c;
    if (j.contains("kind")) {
        const auto k = get_string(j["kind"], "law.covariance.kind");
        if (k == "exponential") c.kind = CovarianceKind::exponential;
        else if (k == "gaussian") c.kind = CovarianceKind::gaussian;
        else throw ValidationError("must be 'exponential' or 'gaussian'", "law.covariance.kind");
    }
    if (j.contains("variance")) c.variance = get_number(j["variance"], "law.covariance.variance");
    if (j.contains("correlation_length"))
        c.correlation_length = get_number(j["correlation_length"], "law.covariance.correlation_length");
    c.validate();
    return c;
}

} // namespace

nlohmann::json law_to_json(const FieldLaw& law)
{
    json j;
    j["kind"] = to_string(law.kind);
    if (law.kind == LawKind::constant) {
        j["value"] = law.bounds->first;
        return j;
    }
    if (law.kind != LawKind::two_phase) j["gaussian_mean"] = law.gaussian_mean;
    if (law.covariance)
        j["covariance"] = {{"kind", to_string(law.covariance->kind)},
                           {"variance", law.covariance->variance},
                           {"correlation_length", law.covariance->correlation_length}};
    if (law.bounds && law.kind != LawKind::lognormal) j["bounds"] = {law.bounds->first, law.bounds->second};
    if (law.clamp) j["clamp"] = {law.clamp->first, law.clamp->second};
    return j;
}

FieldLaw law_from_json(const nlohmann::json& j)
{
    reject_unknown(j, {"kind", "value", "gaussian_mean", "covariance", "bounds", "clamp"}, "law");
    if (!j.contains("kind")) throw ValidationError("missing", "law.kind");
    const auto kind = get_string(j["kind"], "law.kind");
    FieldLaw law;
    if (kind == "constant") {
        if (!j.contains("value") && !j.contains("bounds")) throw ValidationError("missing", "law.value");
        if (j.contains("value")) {
            const double v = get_number(j["value"], "law.value");
            law = FieldLaw::constant(v);
        } else {
            law.kind = LawKind::constant;
            law.bounds = get_pair(j["bounds"], "law.bounds");
        }
    } else if (kind == "two_phase" || kind == "lognormal" || kind == "logitnormal") {
        law.kind = kind == "two_phase" ? LawKind::two_phase
                 : kind == "lognormal" ? LawKind::lognormal
                                       : LawKind::logitnormal;
        if (j.contains("value")) throw ValidationError("only constant laws take a value", "law.value");
        if (j.contains("gaussian_mean")) law.gaussian_mean = get_number(j["gaussian_mean"], "law.gaussian_mean");
        if (j.contains("covariance")) law.covariance = covariance_from_json(j["covariance"]);
        if (j.contains("bounds")) law.bounds = get_pair(j["bounds"], "law.bounds");
        if (j.contains("clamp")) {
            if (law.kind != LawKind::lognormal) throw ValidationError("only lognormal laws take a clamp", "law.clamp");
            law.clamp = get_pair(j["clamp"], "law.clamp");
        }
    } else {
        throw ValidationError("must be one of constant, two_phase, lognormal, logitnormal", "law.kind");
    }
    law.validate();
    return law;
}

std::vector<Direction> RunConfig::xi_list() const
{
    std::vector<Direction> out;
    if (directions.empty()) {
        out.push_back(Direction::axis(dimension, 0));
        return out;
    }
    for (const auto& d : directions) {
        if (static_cast<int>(d.size()) != dimension)
            throw ValidationError("direction has wrong number of components", "directions");
        try {
            out.emplace_back(std::span<const double>(d));
        } catch (const ValidationError& e) {
            throw ValidationError("not a unit vector", "directions");
        }
    }
    return out;
}

RunConfig parse_config(const nlohmann::json& doc)
{
    reject_unknown(doc,
                   {"dimension", "cells", "spacing", "law", "methods", "T", "window", "directions", "realizations",
                    "master_seed", "solver", "time", "output", "threads", "field_file", "field_format",
                    "polarization", "export_solutions", "spectrum_threshold", "rate", "decay", "sweep"},
                   "");
    RunConfig c;
    c.source = doc;
    if (doc.contains("dimension")) {
        const auto d = get_count(doc["dimension"], "dimension");
        if (d != 1 && d != 2) throw ValidationError("must be 1 or 2", "dimension");
        c.dimension = static_cast<int>(d);
    }
    if (doc.contains("cells")) c.cells = get_count(doc["cells"], "cells");
    if (c.cells < 2) throw ValidationError("need at least 2 cells per side", "cells");
    if (doc.contains("spacing")) c.spacing = get_number(doc["spacing"], "spacing");
    if (!(c.spacing > 0.0)) throw ValidationError("must be positive", "spacing");
    if (doc.contains("law")) c.law = law_from_json(doc["law"]);
    if (doc.contains("methods")) {
        const auto& m = doc["methods"];
        if (!m.is_array() || m.empty()) throw ValidationError("must be a nonempty array", "methods");
        c.methods.clear();
        for (const auto& v : m) {
            const auto parsed = parse_method(get_string(v, "methods"));
            if (!parsed) throw ValidationError("unknown method '" + v.get<std::string>() + "'", "methods");
            c.methods.push_back(*parsed);
        }
    }
    if (doc.contains("T")) c.T_values = get_numbers(doc["T"], "T");
    for (double T : c.T_values)
        if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T values must be positive and finite", "T");
    if (doc.contains("window")) c.window = get_number(doc["window"], "window");
    if (doc.contains("directions")) {
        const auto& d = doc["directions"];
        if (!d.is_array()) throw ValidationError("must be an array of vectors", "directions");
        for (const auto& v : d) c.directions.push_back(get_numbers(v, "directions"));
    }
    if (doc.contains("realizations")) c.realizations = get_count(doc["realizations"], "realizations");
    if (c.realizations == 0) throw ValidationError("need at least one realization", "realizations");
    if (doc.contains("master_seed")) {
        if (!doc["master_seed"].is_number_unsigned() && !doc["master_seed"].is_number_integer())
            throw ValidationError("must be an unsigned integer", "master_seed");
        c.master_seed = doc["master_seed"].get<std::uint64_t>();
    }
    if (doc.contains("solver")) {
        const auto& s = doc["solver"];
        reject_unknown(s, {"tol", "maxit", "preconditioner", "backend"}, "solver");
        if (s.contains("tol")) c.solver.tol = get_number(s["tol"], "solver.tol");
        if (s.contains("maxit")) c.solver.maxit = get_count(s["maxit"], "solver.maxit");
        if (s.contains("preconditioner")) {
            const auto p = get_string(s["preconditioner"], "solver.preconditioner");
            if (p == "none") c.solver.preconditioner = Preconditioner::none;
            else if (p == "jacobi") c.solver.preconditioner = Preconditioner::jacobi;
            else if (p == "fourier") c.solver.preconditioner = Preconditioner::fourier;
            else throw ValidationError("must be none, jacobi or fourier", "solver.preconditioner");
        }
        if (s.contains("backend")) {
            const auto b = get_string(s["backend"], "solver.backend");
            if (b == "auto") c.solver.backend = Backend::automatic;
            else if (b == "cg") c.solver.backend = Backend::cg;
            else if (b == "direct") c.solver.backend = Backend::direct;
            else throw ValidationError("must be auto, cg or direct", "solver.backend");
        }
        c.solver.validate();
    }
    if (c.solver.backend == Backend::direct && c.dimension != 1)
        throw ValidationError("the direct solver is one-dimensional only", "solver.backend");
    if (doc.contains("time")) {
        const auto& t = doc["time"];
        reject_unknown(t, {"scheme", "dt0", "fraction", "growth"}, "time");
        if (t.contains("scheme")) {
            const auto s = get_string(t["scheme"], "time.scheme");
            if (s == "implicit_euler") c.time.scheme = TimeScheme::implicit_euler;
            else if (s == "crank_nicolson") c.time.scheme = TimeScheme::crank_nicolson;
            else throw ValidationError("must be implicit_euler or crank_nicolson", "time.scheme");
        }
        if (t.contains("dt0")) c.time.dt0 = get_number(t["dt0"], "time.dt0");
        if (t.contains("fraction")) c.time.fraction = get_number(t["fraction"], "time.fraction");
        if (t.contains("growth")) c.time.growth = get_number(t["growth"], "time.growth");
        c.time.validate();
    }
    if (doc.contains("output")) c.output = get_string(doc["output"], "output");
    if (doc.contains("threads")) c.threads = static_cast<int>(get_count(doc["threads"], "threads"));
    if (doc.contains("field_file")) c.field_file = get_string(doc["field_file"], "field_file");
    if (doc.contains("field_format")) {
        const auto f = get_string(doc["field_format"], "field_format");
        if (f == "csv") c.field_format = FieldFormat::csv;
        else if (f == "binary") c.field_format = FieldFormat::binary;
        else throw ValidationError("must be csv or binary", "field_format");
    }
    if (doc.contains("polarization")) {
        if (!doc["polarization"].is_boolean()) throw ValidationError("must be a boolean", "polarization");
        c.polarization = doc["polarization"].get<bool>();
    }
    if (doc.contains("export_solutions")) {
        if (!doc["export_solutions"].is_boolean()) throw ValidationError("must be a boolean", "export_solutions");
        c.export_solutions = doc["export_solutions"].get<bool>();
    }
    if (doc.contains("spectrum_threshold"))
        c.spectrum_threshold = get_number(doc["spectrum_threshold"], "spectrum_threshold");
    if (doc.contains("rate")) {
        const auto& r = doc["rate"];
        reject_unknown(r, {"method", "synthetic_exponent"}, "rate");
        if (r.contains("method")) {
            const auto m = parse_method(get_string(r["method"], "rate.method"));
            if (!m || (*m != Method::modified && *m != Method::modified_quadrature))
                throw ValidationError("must be modified or modified_quadrature", "rate.method");
            c.rate_method = *m;
        }
        if (r.contains("synthetic_exponent"))
            c.synthetic_exponent = get_number(r["synthetic_exponent"], "rate.synthetic_exponent");
    }
    if (doc.contains("decay")) {
        const auto& d = doc["decay"];
        reject_unknown(d, {"T", "fit_window"}, "decay");
        if (d.contains("T")) c.decay_T = get_number(d["T"], "decay.T");
        if (!(c.decay_T > 0.0)) throw ValidationError("must be positive", "decay.T");
        if (d.contains("fit_window")) c.decay_fit_window = get_pair(d["fit_window"], "decay.fit_window");
        if (!(c.decay_fit_window.first > 0.0) || !(c.decay_fit_window.second > c.decay_fit_window.first))
            throw ValidationError("must be an increasing pair of positive times", "decay.fit_window");
    }
    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        reject_unknown(s, {"cells"}, "sweep");
        if (s.contains("cells")) {
            if (!s["cells"].is_array()) throw ValidationError("must be an array", "sweep.cells");
            for (const auto& v : s["cells"]) c.sweep_cells.push_back(get_count(v, "sweep.cells"));
        }
    }

    // Cross-field checks that need the grid.
    const PeriodicGrid grid = c.grid();
    AveragingWindow{c.window}.cells(grid);
    c.xi_list();
    return c;
}

nlohmann::json apply_env_overrides(nlohmann::json doc, const std::vector<std::string>& environ_entries)
{
    const std::string prefix = "HOMOG_";
    for (const auto& entry : environ_entries) {
        if (entry.rfind(prefix, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(prefix.size(), eq - prefix.size());
        const std::string raw = entry.substr(eq + 1);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (name.empty()) continue;

        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;

        json* node = &doc;
        std::size_t start = 0;
        while (true) {
            const auto sep = name.find("__", start);
            const std::string key = name.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
            if (sep == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
            node = &(*node)[key];
            start = sep + 2;
        }
    }
    return doc;
}

} // namespace homog
