#pragma once

// Scenario files for the batch front end: schema, validation, canonical dump,
// and execution against the built-in catalog.
//
// A scenario is a JSON object:
//
//   {
//     "kind":      "solve" | "impulsive" | "timescale" | "horizon" | "sap" | "dependence" | "certificate",
//     "catalog":   catalog id (see catalog_entries()),
//     "params":    { name: number | [numbers] }   (optional; defaults filled in)
//     "grid_step": positive number                 (optional)
//     "tol":       positive number                 (optional; point tolerance)
//     "seed":      non-negative integer            (optional)
//     "out_dir":   string                          (optional)
//   }

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hmde/asymptotics.hpp"
#include "hmde/catalog.hpp"
#include "hmde/certificate.hpp"
#include "hmde/dependence.hpp"
#include "hmde/frontends.hpp"
#include "hmde/solver.hpp"

namespace hmde::scenario {

using Json = nlohmann::json;
using ParamValue = std::variant<double, std::vector<double>>;

inline const std::vector<std::string>& kinds() {
    static const std::vector<std::string> k{"solve", "impulsive", "timescale", "horizon",
                                            "sap", "dependence", "certificate"};
    return k;
}

struct ParamSpec {
    std::string name;
    ParamValue fallback;
    bool integer = false;
    std::string help;
};

struct CatalogEntry {
    std::string id;
    std::vector<std::string> kinds;
    std::string summary;
    std::vector<ParamSpec> params;
    double grid_step = 1e-3;
};

inline const std::vector<CatalogEntry>& catalog_entries() {
    static const std::vector<CatalogEntry> entries{
        {"example_3x",
         {"solve", "certificate"},
         "x = 1/2 sin^2(t) ln(1+|x|) + int eta e^{gamma cos x} dt on [0, a]; hybrid term with "
         "contraction modulus 1/2 ln(1+t)",
         {{"gamma", 1.0, false, "exponent in e^{gamma cos x}"},
          {"eta", 1.0, false, "constant factor eta"},
          {"x0", 0.0, false, "initial value"},
          {"a", 1.0, false, "interval length"}},
         1e-3},
        {"impulsive_linear",
         {"impulsive"},
         "x' = lambda x with impulses x(tau+) = (1 + beta) x(tau); product-formula oracle",
         {{"lambda", 1.0, false, "growth rate"},
          {"beta", 0.5, false, "impulse factor, I(u) = beta u"},
          {"x0", 1.0, false, "initial value"},
          {"a", 1.0, false, "interval length"},
          {"impulse_times", std::vector<double>{0.25, 0.5, 0.75}, false, "strictly increasing, inside (0, a)"}},
         1e-3},
        {"timescale_linear",
         {"timescale"},
         "x^Delta = c x on a finite set of isolated points; discrete recursion oracle",
         {{"points", std::vector<double>{0.0, 0.5, 1.0}, false, "strictly increasing time-scale points"},
          {"coefficient", 1.0, false, "c"},
          {"x0", 1.0, false, "initial value"}},
         1e-3},
        {"example_3x_horizon",
         {"horizon"},
         "example_3x data on [0, H] solved chain by chain over intervals of length L, with the "
         "bounded-solution ratio",
         {{"gamma", 1.0, false, "exponent in e^{gamma cos x}"},
          {"eta", 1.0, false, "constant factor eta"},
          {"x0", 0.0, false, "initial value"},
          {"H", 4.0, false, "horizon (positive multiple of L)"},
          {"L", 1.0, false, "chain length"}},
         1e-2},
        {"example_4x_sap",
         {"sap"},
         "piecewise-linear path with x(n) = a_n, jump a_{n-1} - a_n at n, a_n = 1/(n+1)^power; "
         "S-asymptotic omega-periodicity profile",
         {{"power", 1.0, false, "decay exponent of a_n"},
          {"H", 32.0, false, "horizon"},
          {"omega", 1.0, false, "period"},
          {"windows", 8.0, true, "number of tail windows"},
          {"eps", kSapDefaultEps, false, "classification tolerance"},
          {"nodes_per_unit", 1.0, true, "grid nodes per unit time"}},
         1.0},
        {"dependence_sin",
         {"dependence"},
         "example_3x limit data with members f_k = f + sin(t)/k; gaps |x_k - x| for k = 1..k_max",
         {{"gamma", 1.0, false, "exponent in e^{gamma cos x}"},
          {"eta", 1.0, false, "constant factor eta"},
          {"x0", 0.0, false, "initial value"},
          {"k_max", 16.0, true, "number of members"}},
         1e-2},
    };
    return entries;
}

inline const CatalogEntry* find_entry(const std::string& id) {
    for (const auto& e : catalog_entries())
        if (e.id == id) return &e;
    return nullptr;
}

struct Scenario {
    std::string kind;
    std::string catalog;
    std::map<std::string, ParamValue> params;
    double grid_step = 1e-3;
    double tol = 1e-12;
    std::uint64_t seed = 5489;
    std::string out_dir = "out";

    double num(const std::string& name) const { return std::get<double>(params.at(name)); }
    const std::vector<double>& list(const std::string& name) const {
        return std::get<std::vector<double>>(params.at(name));
    }

    bool operator==(const Scenario&) const = default;
};

struct Validation {
    std::optional<Scenario> scenario;
    std::vector<std::string> errors;
    bool ok() const { return scenario.has_value(); }
};

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline std::optional<double> finite_number(const Json& j) {
    if (!j.is_number()) return std::nullopt;
    const double v = j.get<double>();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

// Semantic checks on a filled-in scenario.
inline void check_semantics(const Scenario& s, std::vector<std::string>& errors) {
    auto positive = [&](const std::string& name) {
        if (!(s.num(name) > 0)) errors.push_back("params." + name + ": must be positive");
    };
    auto strictly_increasing = [&](const std::string& name, std::size_t min_len) {
        const auto& v = s.list(name);
        if (v.size() < min_len)
            errors.push_back("params." + name + ": needs at least " + std::to_string(min_len) + " entries");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1]))
                errors.push_back("params." + name + "[" + std::to_string(i) + "]: must exceed the previous entry");
    };
    if (s.catalog == "example_3x" || s.catalog == "dependence_sin" || s.catalog == "example_3x_horizon")
        if (s.num("eta") < 0) errors.push_back("params.eta: must be non-negative");
    if (s.catalog == "example_3x") positive("a");
    if (s.catalog == "impulsive_linear") {
        positive("a");
        strictly_increasing("impulse_times", 0);
        const auto& taus = s.list("impulse_times");
        for (std::size_t i = 0; i < taus.size(); ++i)
            if (!(taus[i] > 0 && taus[i] < s.num("a")))
                errors.push_back("params.impulse_times[" + std::to_string(i) + "]: " + std::to_string(taus[i]) +
                                 " lies outside (t0, t0 + a) = (0, " + std::to_string(s.num("a")) + ")");
    }
    if (s.catalog == "timescale_linear") strictly_increasing("points", 2);
    if (s.catalog == "example_3x_horizon") {
        positive("H");
        positive("L");
        if (s.num("H") > 0 && s.num("L") > 0) {
            const double q = s.num("H") / s.num("L");
            if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q) || std::round(q) < 1)
                errors.push_back("params.H: must be a positive multiple of params.L");
        }
    }
    if (s.catalog == "example_4x_sap") {
        positive("H");
        positive("omega");
        positive("eps");
        if (s.num("power") < 0) errors.push_back("params.power: must be non-negative");
        if (s.num("omega") > 0 && s.num("H") > 0 && !(s.num("omega") < s.num("H")))
            errors.push_back("params.omega: must be smaller than params.H");
        if (s.num("windows") < 1) errors.push_back("params.windows: must be at least 1");
        if (s.num("nodes_per_unit") < 1) errors.push_back("params.nodes_per_unit: must be at least 1");
    }
    if (s.catalog == "dependence_sin" && s.num("k_max") < 1) errors.push_back("params.k_max: must be at least 1");
}

} // namespace detail

/// Parses and validates a scenario document. Never throws; all problems are
/// reported in `errors` with a line/column (syntax) or field path (schema).
inline Validation validate_config(const std::string& text) {
    Validation out;
    auto& errors = out.errors;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte);
        std::string msg = e.what();
        if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
        errors.push_back("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
        return out;
    } catch (const Json::exception& e) {
        // number overflow: locate the offending literal
        std::string msg = e.what();
        std::size_t byte = 0;
        if (auto q = msg.find('\''); q != std::string::npos)
            if (auto q2 = msg.find('\'', q + 1); q2 != std::string::npos)
                if (auto at = text.find(msg.substr(q + 1, q2 - q - 1)); at != std::string::npos) byte = at + 1;
        const auto [line, col] = detail::line_column(text, byte);
        errors.push_back("line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": non-finite number (" + msg + ")");
        return out;
    }
    if (!doc.is_object()) {
        errors.push_back("document: expected a JSON object");
        return out;
    }

    static const std::vector<std::string> fields{"kind", "catalog", "params", "grid_step", "tol", "seed", "out_dir"};
    for (const auto& [key, _] : doc.items())
        if (std::find(fields.begin(), fields.end(), key) == fields.end())
            errors.push_back(key + ": unknown field (allowed: " + detail::join(fields) + ")");

    Scenario s;
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        errors.push_back("kind: required string field (one of: " + detail::join(kinds()) + ")");
        return out;
    }
    s.kind = doc["kind"].get<std::string>();
    if (std::find(kinds().begin(), kinds().end(), s.kind) == kinds().end()) {
        errors.push_back("kind: unknown kind '" + s.kind + "' (one of: " + detail::join(kinds()) + ")");
        return out;
    }
    if (!doc.contains("catalog") || !doc["catalog"].is_string()) {
        errors.push_back("catalog: required string field");
        return out;
    }
    s.catalog = doc["catalog"].get<std::string>();
    const CatalogEntry* entry = find_entry(s.catalog);
    if (!entry) {
        std::vector<std::string> ids;
        for (const auto& e : catalog_entries()) ids.push_back(e.id);
        errors.push_back("catalog: unknown catalog id '" + s.catalog + "' (one of: " + detail::join(ids) + ")");
        return out;
    }
    if (std::find(entry->kinds.begin(), entry->kinds.end(), s.kind) == entry->kinds.end())
        errors.push_back("kind: catalog entry '" + s.catalog + "' supports kind " + detail::join(entry->kinds) +
                         ", not '" + s.kind + "'");

    s.grid_step = entry->grid_step;
    auto positive_number = [&](const char* key, double& dst) {
        if (!doc.contains(key)) return;
        const auto v = detail::finite_number(doc[key]);
        if (!v || !(*v > 0)) errors.push_back(std::string(key) + ": must be a finite positive number");
        else dst = *v;
    };
    positive_number("grid_step", s.grid_step);
    positive_number("tol", s.tol);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) errors.push_back("seed: must be a non-negative integer");
        else s.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("out_dir")) {
        if (!doc["out_dir"].is_string() || doc["out_dir"].get<std::string>().empty())
            errors.push_back("out_dir: must be a non-empty string");
        else s.out_dir = doc["out_dir"].get<std::string>();
    }

    for (const auto& p : entry->params) s.params[p.name] = p.fallback;
    if (doc.contains("params")) {
        const Json& params = doc["params"];
        if (!params.is_object()) {
            errors.push_back("params: must be an object");
        } else {
            for (const auto& [key, value] : params.items()) {
                const std::string path = "params." + key;
                auto spec = std::find_if(entry->params.begin(), entry->params.end(),
                                         [&](const ParamSpec& p) { return p.name == key; });
                if (spec == entry->params.end()) {
                    std::vector<std::string> names;
                    for (const auto& p : entry->params) names.push_back(p.name);
                    errors.push_back(path + ": unknown parameter for '" + s.catalog + "' (allowed: " +
                                     detail::join(names) + ")");
                    continue;
                }
                if (std::holds_alternative<double>(spec->fallback)) {
                    const auto v = detail::finite_number(value);
                    if (!v) {
                        errors.push_back(path + ": must be a finite number");
                    } else if (spec->integer && *v != std::floor(*v)) {
                        errors.push_back(path + ": must be an integer");
                    } else {
                        s.params[key] = *v;
                    }
                } else {
                    if (!value.is_array()) {
                        errors.push_back(path + ": must be an array of numbers");
                        continue;
                    }
                    std::vector<double> list;
                    bool good = true;
                    for (std::size_t i = 0; i < value.size(); ++i) {
                        const auto v = detail::finite_number(value[i]);
                        if (!v) {
                            errors.push_back(path + "[" + std::to_string(i) + "]: must be a finite number");
                            good = false;
                        } else {
                            list.push_back(*v);
                        }
                    }
                    if (good) s.params[key] = list;
                }
            }
        }
    }
    if (errors.empty()) detail::check_semantics(s, errors);
    if (errors.empty()) out.scenario = std::move(s);
    return out;
}

/// Canonical JSON: every field present, keys sorted, numbers round-trip exact.
inline std::string dump_config(const Scenario& s) {
    Json params = Json::object();
    for (const auto& [name, value] : s.params) {
        if (const double* d = std::get_if<double>(&value)) params[name] = *d;
        else params[name] = std::get<std::vector<double>>(value);
    }
    Json doc = {{"kind", s.kind},           {"catalog", s.catalog}, {"params", params},
                {"grid_step", s.grid_step}, {"tol", s.tol},         {"seed", s.seed},
                {"out_dir", s.out_dir}};
    return doc.dump(2) + "\n";
}

/// Human-readable catalog listing.
inline std::string list_catalog() {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    for (const auto& e : catalog_entries()) {
        os << e.id << "  [kinds: " << detail::join(e.kinds) << "; default grid_step " << e.grid_step << "]\n";
        os << "  " << e.summary << "\n";
        for (const auto& p : e.params) {
            os << "    " << p.name << " = ";
            if (const double* d = std::get_if<double>(&p.fallback)) {
                os << *d;
            } else {
                os << "[";
                const auto& v = std::get<std::vector<double>>(p.fallback);
                for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
                os << "]";
            }
            os << (p.integer ? " (integer)" : "") << "  " << p.help << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Execution

struct RunResult {
    std::vector<std::string> files;  ///< written artifacts
    bool ok = true;
    std::string error;
};

namespace detail {

/// Stream with fixed formatting for reproducible output.
struct Out {
    std::ostringstream os;
    Out() {
        os.imbue(std::locale::classic());
        os << std::setprecision(17);
    }
};

inline void write_file(const std::filesystem::path& path, const std::string& text, RunResult& res) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + path.string());
    f << text;
    res.files.push_back(path.string());
}

/// solution.csv: t, x_1..x_n, left_1..left_n, right_1..right_n[, extra columns].
inline std::string solution_csv(const RegulatedPath& x, const std::vector<std::string>& extra_names = {},
                                const std::function<std::vector<double>(std::size_t)>& extra = {}) {
    Out o;
    const Eigen::Index n = x.dim();
    o.os << "t";
    for (const char* part : {"x", "left", "right"})
        for (Eigen::Index j = 1; j <= n; ++j) o.os << "," << part << "_" << j;
    for (const auto& e : extra_names) o.os << "," << e;
    o.os << "\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        o.os << x.grid()[i];
        for (const State* s : {&x.value(i), &x.left(i), &x.right(i)})
            for (Eigen::Index j = 0; j < n; ++j) o.os << "," << (*s)[j];
        if (extra)
            for (double v : extra(i)) o.os << "," << v;
        o.os << "\n";
    }
    return o.os.str();
}

inline catalog::SolveTolerances tolerances(const Scenario& s) {
    catalog::SolveTolerances t;
    t.point_tol = s.tol;
    t.sweep_tol = std::max(1e-8, 1e4 * s.tol);
    return t;
}

inline SolverOptions options_for(const Scenario& s, double a) {
    return catalog::make_options(TimeGrid::with_step(0.0, a, s.grid_step), tolerances(s));
}

inline void report_certificate(Out& r, const char* name, const CertificateResult& c) {
    r.os << name << ".success = " << (c.success ? "true" : "false") << "\n"
         << name << ".N = " << c.N << "\n"
         << name << ".H0 = " << c.H0 << "\n"
         << name << ".K0 = " << c.K0 << "\n"
         << name << ".margin = " << c.margin << "\n";
}

inline void run_solve(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    const auto p = catalog::example_3x(s.num("gamma"), s.num("eta"), s.num("x0"), s.num("a"), s.grid_step,
                                       tolerances(s));
    const auto rep = solve_forward(p);
    write_file(dir / "solution.csv", solution_csv(rep.solution), res);
    r.os << "residual = " << rep.residual << "\n"
         << "sweeps = " << rep.sweeps << "\n"
         << "nodes = " << rep.solution.size() << "\n"
         << "sup_norm = " << rep.solution.sup_norm() << "\n";
    report_certificate(r, "certificate_A", certificate_A(p));
    for (const auto& n : rep.notes) r.os << "note: " << n << "\n";
}

inline void run_certificate(const Scenario& s, Out& r) {
    const auto p = catalog::example_3x(s.num("gamma"), s.num("eta"), s.num("x0"), s.num("a"), s.grid_step,
                                       tolerances(s));
    report_certificate(r, "certificate_A", certificate_A(p));
    report_certificate(r, "certificate_Astar", certificate_Astar(p));
    for (double N = 1; N <= 64; N *= 2) r.os << "margin_A(N = " << N << ") = " << certificate_margin_A(p, N) << "\n";
}

inline void run_impulsive(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    const double lambda = s.num("lambda"), beta = s.num("beta"), x0 = s.num("x0");
    const auto& taus = s.list("impulse_times");
    const auto spec = catalog::impulsive_linear(lambda, beta, x0, s.num("a"), taus);
    const auto p = from_impulsive(spec, options_for(s, s.num("a")));
    const auto rep = solve_forward(p);
    const auto& x = rep.solution;
    double err = 0;
    auto oracle = [&](std::size_t i) {
        const double t = x.grid()[i];
        const std::vector<double> o{catalog::impulsive_linear_oracle(lambda, beta, x0, taus, t, false),
                                    catalog::impulsive_linear_oracle(lambda, beta, x0, taus, t, true)};
        err = std::max({err, std::abs(o[0] - x.value(i)[0]), std::abs(o[1] - x.right(i)[0])});
        return o;
    };
    write_file(dir / "solution.csv", solution_csv(x, {"oracle", "oracle_right"}, oracle), res);
    r.os << "residual = " << rep.residual << "\n"
         << "sweeps = " << rep.sweeps << "\n"
         << "oracle_sup_error = " << err << "\n";
    const auto tab = restrict_solution(x, spec);
    for (std::size_t i = 0; i < tab.t.size(); ++i)
        if (tab.jump[i].norm() > 0) r.os << "jump(t = " << tab.t[i] << ") = " << tab.jump[i][0] << "\n";
}

inline void run_timescale(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    const auto& pts = s.list("points");
    const auto spec = catalog::timescale_linear(pts, s.num("coefficient"), s.num("x0"));
    SolverOptions o;
    o.point_tol = s.tol;
    o.sweep_tol = tolerances(s).sweep_tol;
    const auto p = from_timescale(spec, o, s.grid_step);
    const auto rep = solve_forward(p);
    const auto tab = restrict_solution(rep.solution, spec);
    const auto oracle = catalog::timescale_linear_oracle(pts, s.num("coefficient"), s.num("x0"));
    auto extra = [&](std::size_t i) {
        const double t = rep.solution.grid()[i];
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (pts[k] == t) return std::vector<double>{oracle[k]};
        return std::vector<double>{std::nan("")};
    };
    write_file(dir / "solution.csv", solution_csv(rep.solution, {"oracle"}, extra), res);
    r.os << "residual = " << rep.residual << "\n";
    for (std::size_t i = 0; i < tab.t.size(); ++i)
        r.os << "x(" << tab.t[i] << ") = " << tab.x[i][0] << "  oracle " << oracle[i] << "\n";
}

inline void run_horizon(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    HorizonProblem hp;
    hp.base = catalog::example_3x(s.num("gamma"), s.num("eta"), s.num("x0"), s.num("H"), s.grid_step, tolerances(s));
    hp.chain_length = s.num("L");
    const auto rep = chain_solve(hp);
    write_file(dir / "solution.csv", solution_csv(rep.solution), res);
    r.os << "chains = " << hp.chains() << "\n"
         << "residual = " << rep.residual << "\n"
         << "sup_norm = " << rep.solution.sup_norm() << "\n";
    std::vector<double> Ns;
    for (double N = 1; N <= 1024; N *= 2) Ns.push_back(N);
    const auto bc = bounded_condition_check(hp, Ns);
    for (std::size_t i = 0; i < bc.N.size(); ++i) r.os << "bounded_ratio(N = " << bc.N[i] << ") = " << bc.ratio[i] << "\n";
    r.os << "bounded_condition = " << (bc.pass ? "pass" : "fail") << "\n";
}

inline void run_sap(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    const auto x = generate_example_path(catalog::harmonic_sequence(s.num("power")), s.num("H"),
                                         static_cast<int>(s.num("nodes_per_unit")));
    const auto prof = sap_profile(x, s.num("omega"), static_cast<int>(s.num("windows")), s.num("eps"));
    Out csv;
    csv.os << "t,gap\n";
    for (std::size_t i = 0; i < prof.t.size(); ++i) csv.os << prof.t[i] << "," << prof.gap[i] << "\n";
    write_file(dir / "profile.csv", csv.os.str(), res);
    for (std::size_t w = 0; w < prof.window_sup.size(); ++w) r.os << "window_sup[" << w << "] = " << prof.window_sup[w] << "\n";
    r.os << "tail_sup = " << prof.window_sup.back() << "\n"
         << "classification = " << (prof.sap ? "SAP" : "not SAP") << " at eps = " << prof.eps << " over H = "
         << s.num("H") << "\n";
}

inline void run_dependence(const Scenario& s, const std::filesystem::path& dir, Out& r, RunResult& res) {
    const auto base = catalog::example_3x(s.num("gamma"), s.num("eta"), s.num("x0"), 1.0, s.grid_step, tolerances(s));
    const auto seq = catalog::dependence_sin(base, static_cast<int>(s.num("k_max")));
    const auto tab = dependence_run(seq);
    Out csv;
    csv.os << "k,gap,solved_flag\n";
    for (std::size_t i = 0; i < tab.k.size(); ++i)
        csv.os << tab.k[i] << "," << tab.gap[i] << "," << (tab.solved[i] ? 1 : 0) << "\n";
    write_file(dir / "dependence.csv", csv.os.str(), res);

    const auto cert = certificate_A(base);
    HypothesisOptions ho;
    ho.seed = s.seed;
    const auto hyp = hypothesis_check(seq, make_hypothesis_samples(base, cert.N), ho);
    r.os << "monotone_fraction = " << tab.monotone_fraction << "\n"
         << "tail_min = " << tab.tail_min(1) << "\n"
         << "hypothesis_i = " << (hyp.pass_i ? "pass" : "fail") << "\n"
         << "hypothesis_ii = " << (hyp.pass_ii ? "pass" : "fail") << "\n"
         << "hypothesis_iii = " << (hyp.pass_iii ? "pass" : "fail") << "\n"
         << "C_estimate = " << hyp.C_estimate << "\n"
         << "C_reference = " << hyp.C_reference << "\n"
         << "liminf_sup_phi_ratio = " << hyp.liminf_sup_phi_ratio << "\n";
    for (std::size_t i = 0; i < tab.k.size(); ++i)
        if (!tab.solved[i]) r.os << "member " << tab.k[i] << " failed: " << tab.error[i] << "\n";
}

} // namespace detail

/// Runs a validated scenario, writing artifacts and report.txt into out_dir.
/// Errors are caught, recorded in the report, and flagged in the result.
inline RunResult run_scenario(const Scenario& s) {
    RunResult res;
    const std::filesystem::path dir(s.out_dir);
    std::filesystem::create_directories(dir);
    detail::Out r;
    r.os << "kind = " << s.kind << "\n" << "catalog = " << s.catalog << "\n" << "seed = " << s.seed << "\n";
    try {
        if (s.kind == "solve") detail::run_solve(s, dir, r, res);
        else if (s.kind == "certificate") detail::run_certificate(s, r);
        else if (s.kind == "impulsive") detail::run_impulsive(s, dir, r, res);
        else if (s.kind == "timescale") detail::run_timescale(s, dir, r, res);
        else if (s.kind == "horizon") detail::run_horizon(s, dir, r, res);
        else if (s.kind == "sap") detail::run_sap(s, dir, r, res);
        else if (s.kind == "dependence") detail::run_dependence(s, dir, r, res);
        else throw InvalidArgument("unknown kind " + s.kind);
        r.os << "status = ok\n";
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
        r.os << "status = error\n" << "error = " << e.what() << "\n";
    }
    detail::write_file(dir / "report.txt", r.os.str(), res);
    return res;
}

} // namespace hmde::scenario
