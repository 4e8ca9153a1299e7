#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcl/config.hpp"
#include "hcl/detect.hpp"
#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/parallel.hpp"
#include "hcl/recover.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"

namespace hcl {

struct TrialRecord {
    std::uint32_t rep = 0;
    std::uint32_t n = 0;
    int d = 0;
    std::uint32_t k = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    bool skipped = false;  ///< serialized as "skipped" in the stat column
    std::optional<double> stat;
    std::optional<double> threshold;
    std::optional<bool> reject;
    std::optional<bool> exact;
    std::optional<double> overlap;
    std::optional<double> alpha_n;
    std::optional<double> beta_n;
    std::optional<double> wall_ms;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// One (p, n, k) combination of a sweep.
struct GridPoint {
    std::size_t index = 0;
    std::uint32_t n = 0;
    double p = 0.0;
    std::uint32_t k = 0;
    std::optional<double> k_over_scale;
    std::optional<double> c;  ///< test constant (detect), or the calibrated value (calibrate)
    bool skipped = false;
};

struct SummaryRow {
    GridPoint point;
    int reps = 0;
    int completed = 0;
    std::optional<double> reject_rate;
    std::optional<double> exact_rate;
    std::optional<double> mean_overlap;
    std::optional<double> mean_stat;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<GridPoint> grid;
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;
};

/// Seed of replicate `rep` at grid point `grid_index`.
inline std::uint64_t replicate_seed(std::uint64_t master, std::size_t grid_index, std::size_t rep) {
    return mix64({master, static_cast<std::uint64_t>(grid_index), static_cast<std::uint64_t>(rep)});
}

/// True when sampling at (n, d, p) would exceed the expected-edge cap.
inline bool exceeds_capacity(std::uint32_t n, int d, double p) {
    return p * binom_real(n, static_cast<std::uint64_t>(d)) > kMaxExpectedEdges;
}

namespace detail {

inline std::uint32_t resolve_k(double value, double scale, std::uint32_t n) {
    const double k = std::round(value * scale);
    if (!(k >= 0.0) || k > static_cast<double>(n))
        throw ConfigError("resolved planted size " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    return static_cast<std::uint32_t>(k);
}

inline std::uint64_t calibration_seed(std::uint64_t master, std::uint32_t n, double p) {
    return mix64({master, 0x63616c6962ULL, n, std::bit_cast<std::uint64_t>(p)});
}

}  // namespace detail

/**
 * Expands the spec into grid points, ordered p-major, then n, then k. Detect mode without
 * an explicit C calibrates it per (n, p) first.
 */
inline std::vector<GridPoint> expand_grid(const ExperimentSpec& spec, unsigned workers) {
    std::vector<GridPoint> grid;
    for (double p : spec.p_grid)
        for (auto n : spec.n_grid) {
            std::optional<double> c = spec.c;
            const bool capped = exceeds_capacity(n, spec.d, p);
            if (spec.mode == Mode::calibrate && !(p > 0.0)) throw ConfigError("calibrate mode needs p > 0");
            if (spec.mode == Mode::detect && !c && !capped) {
                if (!(p > 0.0)) throw ConfigError("calibrating C needs p > 0; supply c explicitly");
                c = calibrate_C(ModelParams{n, spec.d, 0, p}, spec.alpha, spec.calibration_reps,
                                detail::calibration_seed(spec.master_seed, n, p), spec.solver, workers);
            }
            const auto ks = spec.mode == Mode::calibrate ? std::vector<double>{0.0} : spec.k_grid;
            for (double kv : ks) {
                GridPoint g;
                g.index = grid.size();
                g.n = n;
                g.p = p;
                g.c = c;
                g.skipped = capped;
                if (spec.k_relative && spec.mode != Mode::calibrate) {
                    g.k_over_scale = kv;
                    const double scale = spec.mode == Mode::detect ? (c ? k0_formula(n, spec.d, p, *c) : 0.0)
                                                                   : recovery_scale(n, spec.d, p);
                    g.k = capped ? 0 : detail::resolve_k(kv, scale, n);
                } else {
                    g.k = static_cast<std::uint32_t>(kv);
                }
                grid.push_back(g);
            }
        }
    return grid;
}

/// Runs one replicate. Capacity refusals become skipped rows.
inline TrialRecord run_trial(const ExperimentSpec& spec, const GridPoint& g, std::uint32_t rep) {
    TrialRecord r;
    r.rep = rep;
    r.n = g.n;
    r.d = spec.d;
    r.k = g.k;
    r.p = g.p;
    r.seed = replicate_seed(spec.master_seed, g.index, rep);
    if (g.skipped) {
        r.skipped = true;
        return r;
    }
    const auto start = std::chrono::steady_clock::now();
    const ModelParams params{g.n, spec.d, spec.mode == Mode::calibrate ? 0u : g.k, g.p};
    try {
        const auto sample = sample_hpc(params, mix64({r.seed, 1}));
        const auto a = project(sample);
        const std::uint64_t solver_seed = mix64({r.seed, 2});
        switch (spec.mode) {
            case Mode::detect: {
                const auto o = run_test(a, DetectionConfig{ModelParams{g.n, spec.d, 0, g.p}, *g.c, spec.solver, spec.alpha}, solver_seed);
                r.stat = o.statistic;
                r.threshold = o.threshold;
                r.reject = o.reject;
                break;
            }
            case Mode::calibrate: {
                CenteredOperator op(a, null_mean_offdiag(params));
                r.stat = spectral_norm(op, spec.solver, solver_seed) / null_scale(g.n, spec.d, g.p);
                break;
            }
            case Mode::recover:
            case Mode::phase: {
                if (g.k == 0) {
                    CenteredOperator op(a, null_mean_offdiag(params));
                    const auto e = leading_algebraic_eigenpair(op, spec.solver, solver_seed);
                    if (!e.converged) throw SolverError("eigensolver did not converge");
                    r.stat = e.value;
                    break;
                }
                auto o = spectral_recover(a, g.k, spec.d, g.p, spec.solver, solver_seed, spec.centering);
                score(o, sample.planted());
                r.stat = o.eigen.value;
                r.exact = o.exact;
                r.overlap = o.overlap;
                if (!params.planted_degenerate() && g.p < 1.0) {
                    const auto pd = proxy_diagnostics(a, sample.planted(), params, o.eigen.vector);
                    r.alpha_n = pd.alpha_n;
                    r.beta_n = pd.beta_n;
                }
                break;
            }
            default: throw ConfigError("mode " + mode_name(spec.mode) + " is not a Monte Carlo mode");
        }
    } catch (const CapacityError&) {
        TrialRecord skipped;
        skipped.rep = r.rep;
        skipped.n = r.n;
        skipped.d = r.d;
        skipped.k = r.k;
        skipped.p = r.p;
        skipped.seed = r.seed;
        skipped.skipped = true;
        return skipped;
    }
    if (spec.record_wall_time)
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<GridPoint>& grid,
                                         const std::vector<TrialRecord>& records) {
    std::vector<SummaryRow> out;
    const auto reps = static_cast<std::size_t>(spec.reps);
    for (const auto& g : grid) {
        SummaryRow s;
        s.point = g;
        s.reps = spec.reps;
        double rej = 0, ex = 0, ov = 0, st = 0;
        int n_rej = 0, n_ex = 0, n_st = 0;
        std::vector<double> stats;
        for (std::size_t i = g.index * reps; i < (g.index + 1) * reps; ++i) {
            const auto& r = records[i];
            if (r.skipped) continue;
            ++s.completed;
            if (r.reject) { rej += *r.reject; ++n_rej; }
            if (r.exact) { ex += *r.exact; ov += *r.overlap; ++n_ex; }
            if (r.stat) { st += *r.stat; ++n_st; stats.push_back(*r.stat); }
        }
        if (n_rej) s.reject_rate = rej / n_rej;
        if (n_ex) { s.exact_rate = ex / n_ex; s.mean_overlap = ov / n_ex; }
        if (n_st) s.mean_stat = st / n_st;
        if (spec.mode == Mode::calibrate && !stats.empty()) s.point.c = upper_quantile(stats, spec.alpha);
        out.push_back(s);
    }
    return out;
}

/// Executes every (grid point, replicate) task; output order never depends on `workers`.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const unsigned workers = resolve_workers(spec.workers);
    ExperimentResult res;
    res.spec = spec;
    res.grid = expand_grid(spec, workers);
    const auto reps = static_cast<std::size_t>(spec.reps);
    res.records = parallel_map(res.grid.size() * reps, workers, [&](std::size_t t) {
        return run_trial(spec, res.grid[t / reps], static_cast<std::uint32_t>(t % reps));
    });
    res.summary = summarize(spec, res.grid, res.records);
    return res;
}

// ---- CSV ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "rep,n,d,k,p,seed,stat,threshold,reject,exact,overlap,alpha_n,beta_n,wall_ms";

/// 12 significant digits.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace detail {

inline std::string opt(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }
inline std::string opt(const std::optional<bool>& x) { return x ? std::string(*x ? "1" : "0") : std::string(); }

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::optional<double> parse_opt_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return to_double("csv field", s);
}

inline std::optional<bool> parse_opt_bool(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "1") return true;
    if (s == "0") return false;
    throw ConfigError("bad boolean csv field '" + s + "'");
}

}  // namespace detail

inline std::string emit_csv(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw ConfigError("emit_csv: no records");
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.rep << ',' << r.n << ',' << r.d << ',' << r.k << ',' << format_real(r.p) << ',' << r.seed << ','
           << (r.skipped ? std::string("skipped") : detail::opt(r.stat)) << ',' << detail::opt(r.threshold) << ','
           << detail::opt(r.reject) << ',' << detail::opt(r.exact) << ',' << detail::opt(r.overlap) << ','
           << detail::opt(r.alpha_n) << ',' << detail::opt(r.beta_n) << ',' << detail::opt(r.wall_ms) << '\n';
    }
    return os.str();
}

inline std::vector<TrialRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) throw ConfigError("parse_csv: unexpected header");
    std::vector<TrialRecord> out;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 14) throw ConfigError("parse_csv: expected 14 fields");
        TrialRecord r;
        r.rep = static_cast<std::uint32_t>(detail::to_uint("rep", f[0]));
        r.n = static_cast<std::uint32_t>(detail::to_uint("n", f[1]));
        r.d = static_cast<int>(detail::to_uint("d", f[2]));
        r.k = static_cast<std::uint32_t>(detail::to_uint("k", f[3]));
        r.p = detail::to_double("p", f[4]);
        r.seed = detail::to_uint("seed", f[5]);
        if (f[6] == "skipped") r.skipped = true;
        else r.stat = detail::parse_opt_real(f[6]);
        r.threshold = detail::parse_opt_real(f[7]);
        r.reject = detail::parse_opt_bool(f[8]);
        r.exact = detail::parse_opt_bool(f[9]);
        r.overlap = detail::parse_opt_real(f[10]);
        r.alpha_n = detail::parse_opt_real(f[11]);
        r.beta_n = detail::parse_opt_real(f[12]);
        r.wall_ms = detail::parse_opt_real(f[13]);
        out.push_back(r);
    }
    return out;
}

inline constexpr const char* kSummaryHeader = "grid,n,d,k,k_over_scale,p,c,reps,completed,reject_rate,exact_rate,mean_overlap,mean_stat";

inline std::string emit_summary_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << kSummaryHeader << '\n';
    for (const auto& s : res.summary) {
        const auto& g = s.point;
        os << g.index << ',' << g.n << ',' << res.spec.d << ',' << g.k << ',' << detail::opt(g.k_over_scale) << ','
           << format_real(g.p) << ',' << detail::opt(g.c) << ',' << s.reps << ',' << s.completed << ','
           << detail::opt(s.reject_rate) << ',' << detail::opt(s.exact_rate) << ',' << detail::opt(s.mean_overlap) << ','
           << detail::opt(s.mean_stat) << '\n';
    }
    return os.str();
}

// ---- SVG heatmap -------------------------------------------------------------------

struct HeatmapGrid {
    std::string title;
    std::string x_label = "k / scale";
    std::string y_label = "n";
    std::vector<std::string> col_labels;
    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rates;  ///< rates[row][col] in [0, 1]
};

/// Exact-recovery (phase/recover) or rejection (detect) rates at one p, rows = n, columns = k.
inline HeatmapGrid heatmap_from(const ExperimentResult& res, double p) {
    HeatmapGrid h;
    h.title = mode_name(res.spec.mode) + " rate, d=" + std::to_string(res.spec.d) + ", p=" + format_real(p);
    h.x_label = res.spec.k_relative ? "k / scale" : "k";
    for (double k : res.spec.k_grid) h.col_labels.push_back(format_real(k));
    for (auto n : res.spec.n_grid) {
        h.row_labels.push_back(std::to_string(n));
        h.rates.emplace_back();
    }
    for (const auto& s : res.summary) {
        if (s.point.p != p) continue;
        const auto row = static_cast<std::size_t>(std::find(res.spec.n_grid.begin(), res.spec.n_grid.end(), s.point.n) -
                                                  res.spec.n_grid.begin());
        const auto rate = s.exact_rate ? s.exact_rate : s.reject_rate;
        h.rates[row].push_back(rate ? *rate : 0.0);
    }
    return h;
}

inline std::string emit_svg_heatmap(const HeatmapGrid& h) {
    const std::size_t rows = h.rates.size();
    const std::size_t cols = rows ? h.rates.front().size() : 0;
    if (rows == 0 || cols == 0) throw ConfigError("emit_svg_heatmap: empty grid");
    for (const auto& r : h.rates) {
        if (r.size() != cols) throw ConfigError("emit_svg_heatmap: grid is not rectangular");
        for (double v : r)
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("emit_svg_heatmap: rates must lie in [0, 1]");
    }
    if (h.row_labels.size() != rows || h.col_labels.size() != cols) throw ConfigError("emit_svg_heatmap: label count mismatch");
    const int cell = 60, left = 80, top = 50;
    const int width = left + static_cast<int>(cols) * cell + 20;
    const int height = top + static_cast<int>(rows) * cell + 60;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
       << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << h.title << "</text>\n";
    for (std::size_t r = 0; r < rows; ++r) {
        const int y = top + static_cast<int>(r) * cell;
        os << "<text class=\"ylabel\" x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
           << h.row_labels[r] << "</text>\n";
        for (std::size_t c = 0; c < cols; ++c) {
            const int x = left + static_cast<int>(c) * cell;
            const double v = h.rates[r][c];
            const int g = static_cast<int>(std::lround(30.0 + 215.0 * v));
            char label[16];
            std::snprintf(label, sizeof label, "%.3f", v);
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
               << g << ',' << g << ',' << g << ")\" stroke=\"white\"/>\n";
            os << "<text class=\"rate\" x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
               << "\" text-anchor=\"middle\" fill=\"" << (v > 0.5 ? "black" : "white") << "\">" << label << "</text>\n";
        }
    }
    const int base = top + static_cast<int>(rows) * cell;
    for (std::size_t c = 0; c < cols; ++c)
        os << "<text class=\"xlabel\" x=\"" << left + static_cast<int>(c) * cell + cell / 2 << "\" y=\"" << base + 18
           << "\" text-anchor=\"middle\">" << h.col_labels[c] << "</text>\n";
    os << "<text x=\"" << left + static_cast<int>(cols) * cell / 2 << "\" y=\"" << base + 44 << "\" text-anchor=\"middle\">"
       << h.x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + static_cast<int>(rows) * cell / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + static_cast<int>(rows) * cell / 2 << ")\">" << h.y_label << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

/// Cell labels of an emitted heatmap, row-major.
inline std::vector<double> parse_svg_rates(const std::string& svg) {
    static const std::regex re("<text class=\"rate\"[^>]*>([0-9.]+)</text>");
    std::vector<double> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back(std::stod((*it)[1].str()));
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace hcl
