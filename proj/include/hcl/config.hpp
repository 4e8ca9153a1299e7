#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/recover.hpp"
#include "hcl/spectral.hpp"

namespace hcl {

enum class Mode { detect, recover, calibrate, phase, selftest, sample, project };

inline Mode parse_mode(const std::string& s) {
    static const std::map<std::string, Mode> table{{"detect", Mode::detect},     {"recover", Mode::recover},
                                                   {"calibrate", Mode::calibrate}, {"phase", Mode::phase},
                                                   {"selftest", Mode::selftest}, {"sample", Mode::sample},
                                                   {"project", Mode::project}};
    const auto it = table.find(s);
    if (it == table.end()) throw ConfigError("unknown mode '" + s + "'");
    return it->second;
}

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::detect: return "detect";
        case Mode::recover: return "recover";
        case Mode::calibrate: return "calibrate";
        case Mode::phase: return "phase";
        case Mode::selftest: return "selftest";
        case Mode::sample: return "sample";
        case Mode::project: return "project";
    }
    return "?";
}

struct ExperimentSpec {
    Mode mode = Mode::recover;
    int d = 3;
    std::vector<double> p_grid{0.5};
    std::vector<std::uint32_t> n_grid{100};
    /// Absolute planted sizes, or multiples of the mode's scale when k_relative is set
    /// (recovery_scale for recover/phase, k0_formula for detect).
    std::vector<double> k_grid{0};
    bool k_relative = false;
    int reps = 1;
    std::uint64_t master_seed = 1;
    std::optional<double> c;
    double alpha = 0.05;
    int calibration_reps = 200;
    SolverSettings solver;
    Centering centering = Centering::known_p;
    std::string out_dir = ".";
    int workers = 0;  ///< 0 resolves through HCL_WORKERS / hardware concurrency
    bool record_wall_time = false;
    std::string input;  ///< optional input file for project/detect/recover

    void validate() const {
        if (d < 3 || d > kMaxEdgeSize) throw ConfigError("d must lie in [3, 8]");
        if (p_grid.empty() || n_grid.empty() || k_grid.empty()) throw ConfigError("grids must be nonempty");
        if (reps < 1) throw ConfigError("reps must be at least 1");
        for (double p : p_grid)
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
        for (auto n : n_grid)
            if (n < static_cast<std::uint32_t>(d) || n > kMaxVertices) throw ConfigError("every n must satisfy d <= n <= 1000");
        for (double k : k_grid) {
            if (!(k >= 0.0)) throw ConfigError("k grid values must be nonnegative");
            if (!k_relative) {
                if (k != static_cast<double>(static_cast<std::uint64_t>(k))) throw ConfigError("absolute k must be an integer");
                for (auto n : n_grid)
                    if (k > n) throw ConfigError("every k must satisfy k <= n");
            }
        }
        if (c && !(*c > 0.0)) throw ConfigError("c must be positive");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
        if (calibration_reps < 50) throw ConfigError("calibration_reps must be at least 50");
        if (!(solver.tol > 0.0)) throw ConfigError("tol must be positive");
        if (solver.max_iter < 0) throw ConfigError("max_iter must be nonnegative");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigError("empty entry in list '" + s + "'");
        out.push_back(tok);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("bad number for " + key + ": '" + v + "'");
    return x;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &pos, 0);
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size() || v[0] == '-') throw ConfigError("bad integer for " + key + ": '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace detail

/**
 * Applies one key/value pair. Keys: mode, n, d, k, k_scale, p, reps, seed, c, alpha,
 * calibration_reps, tol, max_iter, centering, out, workers, record_wall_time, input.
 * n, k, k_scale and p accept comma lists.
 */
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "mode") {
        spec.mode = parse_mode(value);
    } else if (key == "n") {
        spec.n_grid.clear();
        for (const auto& t : split_list(value)) spec.n_grid.push_back(static_cast<std::uint32_t>(to_uint(key, t)));
    } else if (key == "d") {
        spec.d = static_cast<int>(to_uint(key, value));
    } else if (key == "k" || key == "k_scale") {
        spec.k_grid.clear();
        for (const auto& t : split_list(value)) spec.k_grid.push_back(to_double(key, t));
        spec.k_relative = key == "k_scale";
    } else if (key == "p") {
        spec.p_grid.clear();
        for (const auto& t : split_list(value)) spec.p_grid.push_back(to_double(key, t));
    } else if (key == "reps") {
        spec.reps = static_cast<int>(to_uint(key, value));
    } else if (key == "seed") {
        spec.master_seed = to_uint(key, value);
    } else if (key == "c" || key == "c_const") {
        spec.c = to_double(key, value);
    } else if (key == "alpha") {
        spec.alpha = to_double(key, value);
    } else if (key == "calibration_reps") {
        spec.calibration_reps = static_cast<int>(to_uint(key, value));
    } else if (key == "tol") {
        spec.solver.tol = to_double(key, value);
    } else if (key == "max_iter") {
        spec.solver.max_iter = static_cast<int>(to_uint(key, value));
    } else if (key == "centering") {
        if (value == "known") spec.centering = Centering::known_p;
        else if (value == "estimated") spec.centering = Centering::estimated_p;
        else throw ConfigError("centering must be 'known' or 'estimated'");
    } else if (key == "out") {
        spec.out_dir = value;
    } else if (key == "workers") {
        spec.workers = static_cast<int>(to_uint(key, value));
    } else if (key == "record_wall_time") {
        spec.record_wall_time = to_bool(key, value);
    } else if (key == "input") {
        spec.input = value;
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

/// `key = value` lines; '#' starts a comment.
inline ExperimentSpec parse_config(std::istream& in, ExperimentSpec spec = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        apply_setting(spec, key, value);
    }
    return spec;
}

inline ExperimentSpec parse_config_file(const std::string& path, ExperimentSpec spec = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in, std::move(spec));
}

}  // namespace hcl
