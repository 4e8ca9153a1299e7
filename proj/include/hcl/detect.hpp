#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hcl/combinatorics.hpp"
#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/parallel.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"

namespace hcl {

/// sqrt(n C(n-2, d-2) p): the null scale of ||A - E_0[A]||.
inline double null_scale(std::uint32_t n, int d, double p) {
    return std::sqrt(static_cast<double>(n) * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2))) * p);
}

/// Rejection threshold C sqrt(n C(n-2, d-2) p).
inline double threshold(std::uint32_t n, int d, double p, double c) {
    if (!(c > 0.0)) throw ConfigError("test constant C must be positive");
    return c * null_scale(n, d, p);
}

/// (2C)^{1/(d-1)} (p / (1-p)^2)^{1/(2(d-1))} sqrt(n); the planted size above which the test is powerful.
inline double k0_formula(std::uint32_t n, int d, double p, double c) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("k0_formula requires 0 < p < 1");
    if (!(c > 0.0)) throw ConfigError("test constant C must be positive");
    const double e = 1.0 / static_cast<double>(d - 1);
    return std::pow(2.0 * c, e) * std::pow(p / ((1.0 - p) * (1.0 - p)), 0.5 * e) * std::sqrt(static_cast<double>(n));
}

/// floor(kappa sqrt(n)) + 1 with kappa = (2C sqrt((d-2)!) sqrt(p) / (1-p))^{1/(d-1)}.
inline std::uint64_t k0_integer_form(std::uint32_t n, int d, double p, double c) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("k0_integer_form requires 0 < p < 1");
    double fact = 1.0;
    for (int i = 2; i <= d - 2; ++i) fact *= i;
    const double kappa = std::pow(2.0 * c * std::sqrt(fact) * std::sqrt(p) / (1.0 - p), 1.0 / static_cast<double>(d - 1));
    return static_cast<std::uint64_t>(std::floor(kappa * std::sqrt(static_cast<double>(n)))) + 1;
}

struct DetectionConfig {
    ModelParams params;  ///< k = 0 describes the null being tested against
    double c = 1.0;
    SolverSettings solver;
    double alpha = 0.05;

    void validate() const {
        params.validate();
        if (!(c > 0.0)) throw ConfigError("test constant C must be positive");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    }
};

struct DetectionOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
};

/// Spectral-norm test: reject iff ||A - E_0[A]|| > threshold. Throws SolverError on non-convergence.
inline DetectionOutcome run_test(const AdjacencyMatrix& a, const DetectionConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (a.dim() != cfg.params.n) throw ConfigError("run_test: matrix dimension differs from n");
    CenteredOperator op(a, null_mean_offdiag(cfg.params));
    DetectionOutcome out;
    out.statistic = spectral_norm(op, cfg.solver, seed);
    out.threshold = threshold(cfg.params.n, cfg.params.d, cfg.params.p, cfg.c);
    out.reject = out.statistic > out.threshold;
    return out;
}

/// <u_T, M u_T> = (1/|T|) sum_{i,j in T} M_ij.
inline double quadratic_form_stat(const DenseMatrix& m, std::span<const Vertex> t) {
    if (t.empty()) throw ConfigError("quadratic_form_stat: empty vertex set");
    double s = 0.0;
    for (Vertex i : t)
        for (Vertex j : t) s += m(i, j);
    return s / static_cast<double>(t.size());
}

inline double quadratic_form_stat(const CenteredOperator& op, std::span<const Vertex> t) {
    if (t.empty()) throw ConfigError("quadratic_form_stat: empty vertex set");
    std::vector<double> u(op.dim(), 0.0);
    for (Vertex i : t) u[i] = 1.0;
    const auto mu = op * u;
    double s = 0.0;
    for (Vertex i : t) s += mu[i];
    return s / static_cast<double>(t.size());
}

/// The hyperedge form (1/|T|) sum over all d-sets e of c_e(T)(H_e - p). Enumerates C(n, d) <= 1e7 sets.
inline double quadratic_form_hyperedge(const HypergraphSample& sample, std::span<const Vertex> t) {
    if (t.empty()) throw ConfigError("quadratic_form_hyperedge: empty vertex set");
    const auto n = sample.n();
    const int d = sample.d();
    if (binom_real(n, static_cast<std::uint64_t>(d)) > 1e7)
        throw CapacityError("quadratic_form_hyperedge: C(n,d) exceeds 1e7");
    const double p = sample.params().p;
    std::vector<std::uint64_t> ranks;
    ranks.reserve(sample.edge_count());
    for (std::size_t i = 0; i < sample.edge_count(); ++i) ranks.push_back(rank_dset(sample.edge(i), n, d));
    std::sort(ranks.begin(), ranks.end());
    const auto t_mask = vertex_mask(t, n);
    double s = 0.0;
    std::uint64_t rank = 0;
    std::size_t cursor = 0;
    for_each_dset(n, d, [&](std::span<const Vertex> e) {
        const std::uint64_t c = c_e(e, t_mask);
        bool present = is_subset(e, sample.planted_mask());
        if (cursor < ranks.size() && ranks[cursor] == rank) {
            present = true;
            ++cursor;
        }
        if (c != 0) s += static_cast<double>(c) * ((present ? 1.0 : 0.0) - p);
        ++rank;
    });
    return s / static_cast<double>(t.size());
}

struct SignalTerm {
    double value = 0.0;
    bool degenerate = false;  ///< k0 < d
};

/// s(n, k0) = (1 - p)(k0 - 1) C(k0 - 2, d - 2), the planted mean of <u_T, M u_T> when T = S.
inline SignalTerm signal_term(std::uint32_t /*n*/, std::uint32_t k0, int d, double p) {
    if (k0 < static_cast<std::uint32_t>(d)) return {0.0, true};
    const auto du = static_cast<std::uint64_t>(d);
    // d(d-1) C(k0, d) = k0(k0-1) C(k0-2, d-2)
    if (du * (du - 1) * binom(k0, du) != static_cast<std::uint64_t>(k0) * (k0 - 1) * binom(k0 - 2, du - 2))
        throw std::logic_error("signal_term: counting identity failed");
    return {(1.0 - p) * static_cast<double>(k0 - 1) * static_cast<double>(binom(k0 - 2, du - 2)), false};
}

/**
 * Bernstein lower-tail radius for the quadratic form:
 * (1/k0) [sqrt(2 V l) + (2/3) U_d l], l = log(4/delta), U_d = (d-1)(d-2),
 * V = p(1-p) U_d k0^2 C(n-2, d-2).
 */
inline double detection_noise_radius(std::uint32_t n, std::uint32_t k0, int d, double p, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    const double ud = static_cast<double>((d - 1) * (d - 2));
    const double kk = static_cast<double>(k0);
    const double v = p * (1.0 - p) * ud * kk * kk * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
    const double l = std::log(4.0 / delta);
    return (std::sqrt(2.0 * v * l) + (2.0 / 3.0) * ud * l) / kk;
}

/// ||M|| / sqrt(n C(n-2,d-2) p) for one null replicate.
inline double null_ratio(const ModelParams& null_params, const SolverSettings& solver, std::uint64_t rep_seed) {
    const auto sample = sample_hpc(null_params, mix64({rep_seed, 1}));
    const auto a = project(sample);
    CenteredOperator op(a, null_mean_offdiag(null_params));
    return spectral_norm(op, solver, mix64({rep_seed, 2})) / null_scale(null_params.n, null_params.d, null_params.p);
}

/// Normalized null statistics for reps replicates; replicate i uses seed mix64(seed, i).
inline std::vector<double> null_ratios(ModelParams params, int reps, std::uint64_t seed, const SolverSettings& solver,
                                       unsigned workers) {
    params.k = 0;
    params.validate();
    if (!(params.p > 0.0)) throw ConfigError("null calibration requires p > 0");
    if (reps < 1) throw ConfigError("reps must be positive");
    return parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        return null_ratio(params, solver, mix64({seed, static_cast<std::uint64_t>(i)}));
    });
}

/// Empirical (1 - alpha) quantile: the ceil((1 - alpha) reps)-th smallest value.
inline double upper_quantile(std::vector<double> values, double alpha) {
    if (values.empty()) throw ConfigError("upper_quantile: no values");
    std::sort(values.begin(), values.end());
    auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(values.size()) - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, values.size());
    return values[idx - 1];
}

/// Test constant whose empirical null type-I error is at most alpha over reps samples.
inline double calibrate_C(const ModelParams& params, double alpha, int reps, std::uint64_t seed,
                          const SolverSettings& solver = {}, unsigned workers = 1) {
    if (reps < 50) throw ConfigError("calibrate_C requires reps >= 50");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    return upper_quantile(null_ratios(params, reps, seed, solver, workers), alpha);
}

struct RiskEstimate {
    double type1 = 0.0;
    double type2 = 0.0;
    double total() const { return type1 + type2; }
};

/**
 * Monte Carlo type-I error (null replicates) and type-II error at planted size k_alt.
 * The smallest admissible planted size is the hardest alternative, so one k suffices.
 */
inline RiskEstimate estimate_risk(const ModelParams& params, std::uint32_t k_alt, double c, int reps, std::uint64_t seed,
                                  const SolverSettings& solver = {}, unsigned workers = 1) {
    if (reps < 1) throw ConfigError("reps must be positive");
    DetectionConfig cfg{params, c, solver, 0.05};
    cfg.params.k = 0;
    cfg.validate();
    ModelParams alt = cfg.params;
    alt.k = k_alt;
    alt.validate();
    const auto total = static_cast<std::size_t>(reps);
    const auto rejects = parallel_map(2 * total, workers, [&](std::size_t i) {
        const bool planted = i >= total;
        const auto rs = mix64({seed, planted ? 1ULL : 0ULL, static_cast<std::uint64_t>(i % total)});
        const auto sample = sample_hpc(planted ? alt : cfg.params, mix64({rs, 1}));
        return run_test(project(sample), cfg, mix64({rs, 2})).reject;
    });
    RiskEstimate r;
    for (std::size_t i = 0; i < total; ++i) r.type1 += rejects[i] ? 1.0 : 0.0;
    for (std::size_t i = total; i < 2 * total; ++i) r.type2 += rejects[i] ? 0.0 : 1.0;
    r.type1 /= static_cast<double>(total);
    r.type2 /= static_cast<double>(total);
    return r;
}

}  // namespace hcl
