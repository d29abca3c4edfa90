// Copyright 2026 The fraclat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/**
 * @file cli.hpp
 * @brief Run configuration, kernel cache and the command bodies behind the
 *        `fraclat` executable.
 *
 * Commands return process exit codes: 0 success, 1 property or tolerance
 * failure, 2 usage or configuration error. Every file they write starts with
 * the effective configuration (defaults filled in), as `# key=value` lines in
 * CSV and a `config` object in JSON. The thread count is never recorded: it
 * does not change a single output byte.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclat/continuum.hpp"
#include "fraclat/error.hpp"
#include "fraclat/format.hpp"
#include "fraclat/ids.hpp"
#include "fraclat/kernel.hpp"
#include "fraclat/lattice.hpp"
#include "fraclat/lifshitz.hpp"
#include "fraclat/verify.hpp"

namespace fraclat::cli {

using Json = nlohmann::ordered_json;

enum Exit : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Invalid configuration document or flag combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct KernelConfig {
    KernelMethod method = KernelMethod::DFTGrid;
    int radius = 0;  ///< 0: smallest radius the geometry needs
    double tol = 1e-10;
};

struct RunConfig {
    int dim = 1;
    double alpha = 0.5;
    double lambda = 1.0;
    std::optional<BoundaryCondition> bc;  ///< command default when absent
    std::vector<int> L;                   ///< from "L" (one entry) or "L_list"
    std::vector<double> energies;
    int realizations = 100;
    std::uint64_t seed = 0;
    DisorderFamily family = DisorderFamily::Uniform01;
    double disorder_parameter = 0.0;
    double beta = 1.0;
    KernelConfig kernel;
    std::string output;
    // ids
    std::string estimator = "counting";
    double inner_fraction = 0.5;
    // lifshitz
    int L_min = 4;
    int L_max = 0;
    TailWindow window;
    bool keep_saturated = false;
    double synthetic_gamma = 1.0;
    double synthetic_exponent = 1.0;

    DisorderSpec disorder() const { return {family, disorder_parameter, lambda, seed}; }
};

namespace detail {

inline void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

inline double get_real(const Json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
    return v;
}

inline long long get_int(const Json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return j.get<long long>();
}

inline std::string get_string(const Json& j, const std::string& key) {
    if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
    return j.get<std::string>();
}

inline std::vector<double> parse_energies(const Json& j) {
    std::vector<double> e;
    if (j.is_array()) {
        for (const auto& v : j) e.push_back(get_real(v, "energies[]"));
    } else {
        only_keys(j, "energies", {"geo"});
        if (!j.contains("geo")) throw ConfigError("energies: expected an array or {\"geo\": {...}}");
        const Json& g = j["geo"];
        only_keys(g, "energies.geo", {"from", "to", "points"});
        for (const char* k : {"from", "to", "points"})
            if (!g.contains(k)) throw ConfigError(std::string("energies.geo: missing '") + k + "'");
        const double from = get_real(g["from"], "from"), to = get_real(g["to"], "to");
        const long long n = get_int(g["points"], "points");
        if (!(from > 0.0 && to > 0.0) || from == to || n < 2)
            throw ConfigError("energies.geo: need from, to > 0, from != to, points >= 2");
        const double q = std::log(to / from) / static_cast<double>(n - 1);
        for (long long i = 0; i < n; ++i) e.push_back(i + 1 == n ? to : from * std::exp(q * static_cast<double>(i)));
    }
    if (e.empty()) throw ConfigError("energies: empty grid");
    return e;
}

}  // namespace detail

/// Parses and validates a configuration document. Unknown keys anywhere are errors.
inline RunConfig parse_config(const Json& j) {
    using namespace detail;
    only_keys(j, "config",
              {"dim", "alpha", "lambda", "bc", "L", "L_list", "energies", "realizations", "seed", "disorder", "beta",
               "kernel", "output", "estimator", "inner_fraction", "L_min", "L_max", "fit_window", "keep_saturated",
               "synthetic"});
    RunConfig c;
    try {
        if (j.contains("dim")) c.dim = static_cast<int>(get_int(j["dim"], "dim"));
        if (j.contains("alpha")) c.alpha = get_real(j["alpha"], "alpha");
        if (j.contains("lambda")) c.lambda = get_real(j["lambda"], "lambda");
        if (j.contains("bc")) c.bc = boundary_condition_from_string(get_string(j["bc"], "bc"));
        if (j.contains("L") && j.contains("L_list")) throw ConfigError("give either 'L' or 'L_list', not both");
        if (j.contains("L")) c.L = {static_cast<int>(get_int(j["L"], "L"))};
        if (j.contains("L_list")) {
            if (!j["L_list"].is_array()) throw ConfigError("'L_list' must be an array");
            for (const auto& v : j["L_list"]) c.L.push_back(static_cast<int>(get_int(v, "L_list[]")));
            if (c.L.empty()) throw ConfigError("'L_list' is empty");
        }
        if (j.contains("energies")) c.energies = parse_energies(j["energies"]);
        if (j.contains("realizations")) c.realizations = static_cast<int>(get_int(j["realizations"], "realizations"));
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("disorder")) {
            const Json& d = j["disorder"];
            only_keys(d, "disorder", {"family", "params"});
            if (d.contains("family")) c.family = disorder_family_from_string(get_string(d["family"], "family"));
            const Json params = d.contains("params") ? d["params"] : Json::object();
            switch (c.family) {
                case DisorderFamily::Uniform01:
                    only_keys(params, "disorder.params", {});
                    break;
                case DisorderFamily::Bernoulli:
                    only_keys(params, "disorder.params", {"p"});
                    c.disorder_parameter = params.contains("p") ? get_real(params["p"], "p") : 0.5;
                    break;
                case DisorderFamily::Exponential:
                    only_keys(params, "disorder.params", {"rate"});
                    c.disorder_parameter = params.contains("rate") ? get_real(params["rate"], "rate") : 1.0;
                    break;
            }
        }
        if (j.contains("beta")) c.beta = get_real(j["beta"], "beta");
        if (j.contains("kernel")) {
            const Json& k = j["kernel"];
            only_keys(k, "kernel", {"method", "radius", "tol"});
            if (k.contains("method")) c.kernel.method = kernel_method_from_string(get_string(k["method"], "method"));
            if (k.contains("radius")) c.kernel.radius = static_cast<int>(get_int(k["radius"], "radius"));
            if (k.contains("tol")) c.kernel.tol = get_real(k["tol"], "tol");
        }
        if (j.contains("output")) c.output = get_string(j["output"], "output");
        if (j.contains("estimator")) c.estimator = get_string(j["estimator"], "estimator");
        if (j.contains("inner_fraction")) c.inner_fraction = get_real(j["inner_fraction"], "inner_fraction");
        if (j.contains("L_min")) c.L_min = static_cast<int>(get_int(j["L_min"], "L_min"));
        if (j.contains("L_max")) c.L_max = static_cast<int>(get_int(j["L_max"], "L_max"));
        if (j.contains("fit_window")) {
            const Json& w = j["fit_window"];
            only_keys(w, "fit_window", {"lower", "upper"});
            if (w.contains("lower")) c.window.lower = get_real(w["lower"], "lower");
            if (w.contains("upper")) c.window.upper = get_real(w["upper"], "upper");
        }
        if (j.contains("keep_saturated")) {
            if (!j["keep_saturated"].is_boolean()) throw ConfigError("'keep_saturated' must be true or false");
            c.keep_saturated = j["keep_saturated"].get<bool>();
        }
        if (j.contains("synthetic")) {
            const Json& s = j["synthetic"];
            only_keys(s, "synthetic", {"gamma", "exponent"});
            if (s.contains("gamma")) c.synthetic_gamma = get_real(s["gamma"], "gamma");
            if (s.contains("exponent")) c.synthetic_exponent = get_real(s["exponent"], "exponent");
        }
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }

    if (c.dim < 1 || c.dim > 3) throw ConfigError("'dim' must be 1, 2 or 3");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("'alpha' must lie in (0, 1]");
    if (!(c.lambda >= 0.0)) throw ConfigError("'lambda' must be >= 0");
    for (int L : c.L)
        if (L < 1) throw ConfigError("box half-widths must be >= 1");
    if (c.realizations < 1) throw ConfigError("'realizations' must be >= 1");
    if (!(c.beta > 0.0)) throw ConfigError("'beta' must be positive");
    if (c.kernel.radius < 0) throw ConfigError("'kernel.radius' must be >= 0");
    if (!(c.kernel.tol > 0.0)) throw ConfigError("'kernel.tol' must be positive");
    if (c.estimator != "counting" && c.estimator != "projection")
        throw ConfigError("'estimator' must be \"counting\" or \"projection\"");
    if (!(c.inner_fraction > 0.0 && c.inner_fraction <= 1.0)) throw ConfigError("'inner_fraction' must lie in (0, 1]");
    if (c.L_min < 0 || c.L_max < 0 || (c.L_max > 0 && c.L_max < c.L_min))
        throw ConfigError("need 0 <= L_min <= L_max (L_max = 0 means no cap)");
    if (!(c.window.lower >= 0.0 && c.window.lower < c.window.upper && c.window.upper <= 1.0))
        throw ConfigError("'fit_window' needs 0 <= lower < upper <= 1");
    if (!(c.synthetic_gamma > 0.0 && c.synthetic_exponent > 0.0))
        throw ConfigError("'synthetic' gamma and exponent must be positive");
    try {
        c.disorder().validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

/// Effective configuration with every default spelled out.
inline Json to_json(const RunConfig& c) {
    Json j;
    j["dim"] = c.dim;
    j["alpha"] = c.alpha;
    j["lambda"] = c.lambda;
    j["bc"] = to_string(c.bc.value_or(BoundaryCondition::Free));
    if (c.L.size() == 1) j["L"] = c.L.front();
    else j["L_list"] = c.L;
    j["energies"] = c.energies;
    j["realizations"] = c.realizations;
    j["seed"] = c.seed;
    Json params = Json::object();
    if (c.family == DisorderFamily::Bernoulli) params["p"] = c.disorder_parameter;
    if (c.family == DisorderFamily::Exponential) params["rate"] = c.disorder_parameter;
    j["disorder"] = {{"family", to_string(c.family)}, {"params", params}};
    j["beta"] = c.beta;
    j["kernel"] = {{"method", to_string(c.kernel.method)}, {"radius", c.kernel.radius}, {"tol", c.kernel.tol}};
    j["output"] = c.output;
    j["estimator"] = c.estimator;
    j["inner_fraction"] = c.inner_fraction;
    j["L_min"] = c.L_min;
    j["L_max"] = c.L_max;
    j["fit_window"] = {{"lower", c.window.lower}, {"upper", c.window.upper}};
    j["keep_saturated"] = c.keep_saturated;
    j["synthetic"] = {{"gamma", c.synthetic_gamma}, {"exponent", c.synthetic_exponent}};
    return j;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// One `key=value` pair per top-level key; strings bare, everything else as compact JSON.
inline Metadata metadata_lines(const Json& j) {
    Metadata m;
    for (const auto& [k, v] : j.items()) m.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    return m;
}

// ---------------------------------------------------------------------------
// Kernel cache
// ---------------------------------------------------------------------------

/// Cache directory: the flag if given, else FRACLAT_CACHE_DIR, else none.
inline std::string cache_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    const char* env = std::getenv("FRACLAT_CACHE_DIR");
    return env ? env : "";
}

/// File name keyed by (dim, alpha to 1e-15, radius, method, tol).
inline std::string cache_file_name(int dim, double alpha, int radius, KernelMethod method, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "kernel_d%d_a%.15f_r%d_%s_tol%.6e.txt", dim, alpha, radius,
                  to_string(method).c_str(), tol);
    return buf;
}

/// Writes via a temporary file and rename so readers never see a partial file.
template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        writer(out);
        out.flush();
        if (!out) throw ConfigError("write failed for '" + path + "'");
    }
    std::filesystem::rename(tmp, path);
}

/// Table from the cache when a matching entry exists, computed (and stored) otherwise.
/// Cached values round-trip exactly, so hits and misses give identical bytes downstream.
inline KernelTable obtain_kernel(int dim, double alpha, int radius, KernelMethod method, double tol,
                                 const std::string& dir, unsigned threads) {
    std::string path;
    if (!dir.empty()) {
        path = (std::filesystem::path(dir) / cache_file_name(dim, alpha, radius, method, tol)).string();
        std::ifstream in(path);
        if (in) {
            try {
                KernelTable t = read_kernel_table(in);
                if (t.dim() == dim && t.radius() == radius && t.method() == method &&
                    std::abs(t.alpha() - alpha) <= 1e-15)
                    return t;
            } catch (const Error&) {
                // unreadable entry: recompute and overwrite
            }
        }
    }
    QuadSpec spec;
    spec.abs_tol = tol;
    spec.rel_tol = tol;
    KernelTable t = kernel_table(dim, alpha, radius, method, spec, threads);
    if (!path.empty()) write_file(path, [&](std::ostream& os) { write_kernel_table(os, t); });
    return t;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct KernelOptions {
    int dim = 1;
    double alpha = 0.5;
    int radius = 8;
    std::string method = "dft";  ///< fourier | subordination | dft | both
    double tol = 1e-10;
    std::string out;
    std::string compare;  ///< comparison CSV for `both`; default <out>.compare.csv
    std::string cache;
    unsigned threads = 0;
};

inline int cmd_kernel(const KernelOptions& o, std::ostream& log = std::cout) {
    if (o.dim < 1 || o.dim > 3) throw ConfigError("--dim must be 1, 2 or 3");
    if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw ConfigError("--alpha must lie in (0, 1]");
    if (o.radius < 1) throw ConfigError("--radius must be >= 1");
    if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
    if (o.out.empty()) throw ConfigError("--out is required");
    const bool both = o.method == "both";
    KernelMethod method;
    try {
        method = both ? KernelMethod::Fourier : kernel_method_from_string(o.method);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string(e.what()) + " (expected fourier, subordination, dft or both)");
    }
    const std::string dir = cache_dir(o.cache);
    Metadata meta{{"command", "kernel"}, {"requested_method", o.method}, {"tol", format_real(o.tol)}};

    const KernelTable t = obtain_kernel(o.dim, o.alpha, o.radius, method, o.tol, dir, o.threads);
    write_file(o.out, [&](std::ostream& os) { write_kernel_table(os, t, meta); });
    int status = kSuccess;
    const auto violations = check_table_invariants(t);
    for (const auto& v : violations) {
        log << "invariant violated at z=" << verify::detail::join_z(v.z) << ": " << v.what << '\n';
        status = kFailure;
    }
    if (!both) {
        log << "wrote " << t.values().size() << " values to " << o.out << '\n';
        return status;
    }

    const KernelTable s = obtain_kernel(o.dim, o.alpha, o.radius, KernelMethod::Subordination, o.tol, dir, o.threads);
    const std::string compare = o.compare.empty() ? o.out + ".compare.csv" : o.compare;
    double worst = 0.0;
    int failures = 0;
    write_file(compare, [&](std::ostream& os) {
        os << "# command=kernel\n# dim=" << o.dim << "\n# alpha=" << format_real(o.alpha) << "\n# radius=" << o.radius
           << "\n# tol=" << format_real(o.tol) << "\n# criterion=absdiff <= 1e-6*max(1,|fourier|)\n";
        for (int j = 1; j <= o.dim; ++j) os << 'z' << j << ',';
        os << "fourier,subordination,absdiff\n";
        for (std::size_t i = 0; i < t.values().size(); ++i) {
            const double f = t.values()[i], g = s.values()[i], diff = std::abs(f - g);
            worst = std::max(worst, diff / std::max(1.0, std::abs(f)));
            if (diff > 1e-6 * std::max(1.0, std::abs(f))) ++failures;
            for (int v : t.displacement(i)) os << v << ',';
            os << format_real(f) << ',' << format_real(g) << ',' << format_real(diff) << '\n';
        }
    });
    log << "wrote " << o.out << " and " << compare << "; worst scaled absdiff " << worst << '\n';
    if (failures > 0) {
        log << failures << " displacements exceed 1e-6*max(1,|value|)\n";
        status = kFailure;
    }
    return status;
}

namespace detail {

/// Kernel radius the run needs: the configured one, else the largest box
/// diameter for free boundary conditions, else 1 (only alpha is used).
inline int needed_radius(const RunConfig& c, BoundaryCondition bc, int L_max) {
    if (c.kernel.radius > 0) return c.kernel.radius;
    return bc == BoundaryCondition::Free ? std::max(1, 2 * L_max) : 1;
}

inline void check_box(int dim, int L) {
    if (std::pow(2.0 * L + 1.0, dim) > 4000.0)
        throw ConfigError("box [-" + std::to_string(L) + "," + std::to_string(L) + "]^" + std::to_string(dim) +
                          " exceeds 4000 sites (dense eigensolves)");
}

}  // namespace detail

struct RunOptions {
    std::string config;
    std::string out;  ///< overrides the config's output path
    bool sandwich = false;
    bool synthetic = false;
    std::string cache;
    unsigned threads = 0;
};

inline int cmd_ids(const RunOptions& o, std::ostream& log = std::cout) {
    RunConfig c = load_config(o.config);
    if (!o.out.empty()) c.output = o.out;
    if (c.output.empty()) throw ConfigError("no output path (config 'output' or --out)");
    if (c.L.empty()) throw ConfigError("'L' or 'L_list' is required");
    if (c.energies.empty()) throw ConfigError("'energies' is required");
    if (!std::is_sorted(c.energies.begin(), c.energies.end()) ||
        std::adjacent_find(c.energies.begin(), c.energies.end()) != c.energies.end())
        throw ConfigError("ids: energies must be strictly ascending");
    const bool projection = c.estimator == "projection";
    if (o.sandwich && projection) throw ConfigError("--sandwich uses the counting estimator");
    if (o.sandwich) c.bc = BoundaryCondition::Free;
    if (projection) c.bc = BoundaryCondition::Free;
    if (!c.bc) c.bc = BoundaryCondition::Free;
    const BoundaryCondition bc = *c.bc;
    const int L_max = *std::max_element(c.L.begin(), c.L.end());
    for (int L : c.L) detail::check_box(c.dim, L);
    c.kernel.radius = detail::needed_radius(c, o.sandwich ? BoundaryCondition::Free : bc, L_max);

    const KernelTable kernel =
        obtain_kernel(c.dim, c.alpha, c.kernel.radius, c.kernel.method, c.kernel.tol, cache_dir(o.cache), o.threads);
    Json eff = to_json(c);
    Metadata meta{{"command", o.sandwich ? "ids --sandwich" : "ids"}};
    for (auto& m : metadata_lines(eff)) meta.push_back(std::move(m));
    const DisorderSpec disorder = c.disorder();

    std::vector<IDSCurve> curves;
    std::vector<SandwichViolation> violations;
    for (int L : c.L) {
        const Geometry g{c.dim, L};
        if (o.sandwich) {
            SandwichResult r = sandwich(g, kernel, disorder, c.energies, c.realizations, o.threads);
            curves.push_back(std::move(r.dirichlet));
            curves.push_back(std::move(r.mid));
            curves.push_back(std::move(r.neumann));
            violations.insert(violations.end(), r.violations.begin(), r.violations.end());
        } else if (projection) {
            curves.push_back(ids_projection_estimate(g, kernel, disorder, c.energies, c.realizations,
                                                     c.inner_fraction, o.threads));
        } else {
            curves.push_back(ids_counting_estimate(g, bc, kernel, disorder, c.energies, c.realizations, o.threads));
        }
    }
    write_file(c.output, [&](std::ostream& os) {
        for (std::size_t i = 0; i < curves.size(); ++i) {
            std::ostringstream block;
            write_ids_csv(block, curves[i], i == 0 ? meta : Metadata{});
            std::string text = block.str();
            if (i > 0) text.erase(0, text.find('\n') + 1);  // one header row for the whole file
            os << text;
        }
    });
    log << "wrote " << curves.size() << " curve(s) to " << c.output << '\n';
    if (!violations.empty()) {
        for (const auto& v : violations)
            log << "sandwich violated: realization " << v.realization << " E=" << v.energy << " counts D/mid/N "
                << v.dirichlet << '/' << v.mid << '/' << v.neumann << '\n';
        return kFailure;
    }
    return kSuccess;
}

inline Json point_json(const TailPoint& p) {
    return {{"energy", p.energy}, {"L", p.L},           {"n_hat", p.n_hat},
            {"stderr", p.std_error}, {"saturated", p.saturated}};
}

/// Slope band used by the calibrated trend check: |slope/target - 1| <= 0.35.
inline constexpr double kTrendTolerance = 0.35;

inline int cmd_lifshitz(const RunOptions& o, std::ostream& log = std::cout) {
    RunConfig c = load_config(o.config);
    if (!o.out.empty()) c.output = o.out;
    if (c.output.empty()) throw ConfigError("no output path (config 'output' or --out)");
    if (c.energies.empty()) throw ConfigError("'energies' is required");
    for (std::size_t i = 0; i < c.energies.size(); ++i)
        if (!(c.energies[i] > 0.0) || (i > 0 && !(c.energies[i] < c.energies[i - 1])))
            throw ConfigError("lifshitz: energies must be positive and strictly descending");
    if (!c.L.empty()) throw ConfigError("lifshitz: box sizes come from beta; drop 'L'/'L_list'");
    if (!c.bc) c.bc = BoundaryCondition::Neumann;

    LifshitzFit fit;
    Json eff;
    try {
        if (o.synthetic) {
            const double g = c.synthetic_gamma, x = c.synthetic_exponent;
            eff = to_json(c);
            fit = tail_scan_synthetic(c.dim, c.alpha, c.energies, [g, x](double e) { return std::exp(-g * std::pow(e, -x)); },
                                      c.beta, c.window);
        } else {
            TailScanOptions opt;
            opt.beta = c.beta;
            opt.realizations = c.realizations;
            opt.bc = *c.bc;
            opt.L_min = c.L_min;
            opt.L_max = c.L_max;
            opt.keep_saturated = c.keep_saturated;
            opt.window = c.window;
            opt.threads = o.threads;
            int L_top = 0;
            for (double e : c.energies) L_top = std::max(L_top, tail_box_radius(e, c.alpha, opt, c.dim));
            detail::check_box(c.dim, L_top);
            c.kernel.radius = detail::needed_radius(c, opt.bc, L_top);
            eff = to_json(c);
            const KernelTable kernel = obtain_kernel(c.dim, c.alpha, c.kernel.radius, c.kernel.method, c.kernel.tol,
                                                     cache_dir(o.cache), o.threads);
            fit = tail_scan(c.dim, kernel, c.disorder(), c.energies, opt);
        }
    } catch (const ConvergenceError& e) {
        log << e.what() << '\n';
        return kFailure;
    }

    Json used = Json::array(), excluded = Json::array();
    for (const auto& p : fit.scan) (p.used ? used : excluded).push_back(point_json(p));
    Json out;
    out["slope"] = fit.slope;
    out["slope_stderr"] = fit.slope_stderr;
    out["intercept"] = fit.intercept;
    out["gamma_hat"] = fit.gamma_hat;
    out["target"] = fit.target;
    out["beta"] = fit.beta;
    out["points"] = used;
    out["excluded_points"] = excluded;
    out["trend_tolerance"] = kTrendTolerance;
    out["within_tolerance"] = std::abs(fit.slope / fit.target - 1.0) <= kTrendTolerance;
    out["mode"] = o.synthetic ? "synthetic" : "simulation";
    if (!fit.warning.empty()) out["warning"] = fit.warning;
    out["config"] = eff;
    out["seed"] = c.seed;
    write_file(c.output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
    log << "slope " << fit.slope << " (stderr " << fit.slope_stderr << "), target " << fit.target << ", excluded "
        << fit.excluded << " of " << fit.scan.size() << " points\n";
    if (!fit.warning.empty()) log << "warning: " << fit.warning << '\n';
    return kSuccess;
}

struct VerifyOptions {
    bool full = false;
    std::uint64_t seed = 0;
    std::string kernel_file;  ///< extra table to check, e.g. a cache entry
    std::string out;          ///< summary path; stdout always gets it too
    unsigned threads = 0;
};

inline Json suite_json(const verify::SuiteResult& r) {
    Json f = Json::array();
    for (const auto& x : r.failures)
        f.push_back({{"module", r.module}, {"instance_seed", x.instance_seed}, {"margin", x.margin}, {"detail", x.detail}});
    Json j;
    j["name"] = r.name;
    j["module"] = r.module;
    j["instances"] = r.instances;
    j["passed"] = r.passed();
    j["worst_margin"] = std::isfinite(r.worst_margin) ? Json(r.worst_margin) : Json(nullptr);
    j["failures"] = f;
    return j;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& log = std::cout) {
    std::vector<verify::SuiteResult> results;
    if (!o.kernel_file.empty()) {
        std::ifstream in(o.kernel_file);
        if (!in) throw ConfigError("cannot open kernel file '" + o.kernel_file + "'");
        KernelTable t = [&] {
            try {
                return read_kernel_table(in);
            } catch (const FormatError& e) {
                throw ConfigError(o.kernel_file + ": " + e.what());
            }
        }();
        results.push_back(verify::table_invariants(t, "kernel-file"));
    }
    const verify::Scale scale{o.full, o.threads};
    for (auto& r : verify::run_all(o.seed, scale)) results.push_back(std::move(r));

    bool passed = true;
    Json suites = Json::array();
    for (const auto& r : results) {
        passed = passed && r.passed();
        suites.push_back(suite_json(r));
    }
    Json out;
    out["passed"] = passed;
    out["suites"] = suites;
    Json cfg;
    cfg["mode"] = o.full ? "full" : "quick";
    cfg["seed"] = o.seed;
    cfg["kernel_file"] = o.kernel_file;
    out["config"] = cfg;
    out["seed"] = o.seed;
    const std::string text = out.dump(2) + "\n";
    if (!o.out.empty()) write_file(o.out, [&](std::ostream& os) { os << text; });
    log << text;
    for (const auto& r : results)
        for (const auto& f : r.failures)
            std::cerr << "FAIL " << r.module << '/' << r.name << " seed " << f.instance_seed << " margin " << f.margin
                      << ": " << f.detail << '\n';
    return passed ? kSuccess : kFailure;
}

struct ContinuumOptions {
    int dim = 1;
    double alpha = 0.5;
    std::string function = "gaussian";  ///< gaussian | gaussian_narrow
    std::vector<double> x{5.0, 10.0, 20.0, 40.0};
    double tol = 1e-12;
    std::string out;
};

/// Far-field ratios |x|^{d+2 alpha} (-Delta)^alpha phi(x) / (-K int phi) as CSV x,value,ratio.
inline int cmd_continuum(const ContinuumOptions& o, std::ostream& log = std::cout) {
    if (o.dim != 1 && o.dim != 2) throw ConfigError("--dim must be 1 or 2");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
    if (o.out.empty()) throw ConfigError("--out is required");
    TestFunction phi;
    if (o.function == "gaussian") phi = gaussian(o.dim);
    else if (o.function == "gaussian_narrow") phi = gaussian_narrow(o.dim);
    else throw ConfigError("--function must be gaussian or gaussian_narrow");
    QuadSpec spec;
    spec.abs_tol = o.tol;
    spec.rel_tol = std::max(o.tol, 1e-10);
    TailLimit t;
    try {
        t = tail_limit_check(phi, o.alpha, o.x, spec);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    write_file(o.out, [&](std::ostream& os) {
        os << "# command=continuum\n# dim=" << o.dim << "\n# alpha=" << format_real(o.alpha) << "\n# function="
           << phi.name << "\n# tol=" << format_real(o.tol) << "\n# limit=" << format_real(t.limit) << '\n';
        os << "x,value,ratio\n";
        for (std::size_t i = 0; i < t.X.size(); ++i)
            os << format_real(t.X[i]) << ',' << format_real(t.values[i]) << ',' << format_real(t.ratios[i]) << '\n';
    });
    log << "limit " << t.limit << "; ratios";
    for (double r : t.ratios) log << ' ' << r;
    log << '\n';
    return kSuccess;
}

}  // namespace fraclat::cli
