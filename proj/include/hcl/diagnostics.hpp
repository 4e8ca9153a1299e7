#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hcl/combinatorics.hpp"
#include "hcl/dense.hpp"
#include "hcl/detect.hpp"
#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/parallel.hpp"
#include "hcl/recover.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"

namespace hcl {

struct BernsteinParams {
    double V = 0.0;
    double U = 0.0;
    double ell = 1.0;

    void validate() const {
        if (!(std::isfinite(V) && std::isfinite(U) && std::isfinite(ell)) || V < 0.0 || U < 0.0 || !(ell > 0.0))
            throw ConfigError("BernsteinParams: need finite V, U >= 0 and ell > 0");
    }
};

/// t^2 - ell (2V + (2/3) U t)
inline double bernstein_excess(const BernsteinParams& bp, double t) {
    return t * t - bp.ell * (2.0 * bp.V + (2.0 / 3.0) * bp.U * t);
}

/// (2/3) U ell sqrt(2 V ell)
inline double bernstein_excess_closed_form(const BernsteinParams& bp) {
    return (2.0 / 3.0) * bp.U * bp.ell * std::sqrt(2.0 * bp.V * bp.ell);
}

/// t = sqrt(2 V ell) + (2/3) U ell.
inline double bernstein_t(const BernsteinParams& bp) {
    bp.validate();
    const double t = std::sqrt(2.0 * bp.V * bp.ell) + (2.0 / 3.0) * bp.U * bp.ell;
    assert(bernstein_excess(bp, t) >= -1e-9 * std::max(1.0, t * t));
    return t;
}

// ---- deterministic inequality checkers----------------------------------------------

struct WeylCheck {
    double lhs = 0.0;  ///< max_i |lambda_i(A) - lambda_i(B)|
    double rhs = 0.0;  ///< ||A - B||
    bool holds = false;
};

inline WeylCheck check_weyl_detail(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.dim() != b.dim()) throw ConfigError("check_weyl: dimension mismatch");
    if (a.dim() > 200) throw CapacityError("check_weyl: n exceeds 200");
    for (const DenseMatrix* x : {&a, &b})
        if (!x->is_symmetric(1e-12 * std::max(1.0, x->frobenius()))) throw ConfigError("check_weyl: matrix not symmetric");
    const auto sa = dense_eig_oracle(a);
    const auto sb = dense_eig_oracle(b);
    WeylCheck w;
    for (std::size_t i = 0; i < sa.values.size(); ++i) w.lhs = std::max(w.lhs, std::abs(sa.values[i] - sb.values[i]));
    w.rhs = dense_spectral_norm(a - b);
    w.holds = w.lhs <= w.rhs + 1e-9;
    return w;
}

inline bool check_weyl(const DenseMatrix& a, const DenseMatrix& b) { return check_weyl_detail(a, b).holds; }

/// |M_{m:} v| <= ||M||_{2->inf} ||v||_2 for every row m.
inline bool check_cauchy_schwarz_row(const DenseMatrix& m, std::span<const double> v) {
    if (v.size() != m.dim()) throw ConfigError("check_cauchy_schwarz_row: dimension mismatch");
    const double bound = two_to_inf_norm(m) * norm2(v);
    const auto mv = m * v;
    for (double x : mv)
        if (std::abs(x) > bound * (1.0 + 1e-12) + 1e-300) return false;
    return true;
}

/// sum over d-sets e containing i of (sum_{j in e, j != i} v_j)^2, by enumeration.
inline double sum_ae2_bruteforce(std::uint32_t n, int d, Vertex i, std::span<const double> v) {
    if (v.size() != n || i >= n) throw ConfigError("check_sum_ae2: bad dimensions");
    if (binom_real(n, static_cast<std::uint64_t>(d)) > 1e6) throw CapacityError("check_sum_ae2: C(n,d) exceeds 1e6");
    double total = 0.0;
    for_each_dset(n, d, [&](std::span<const Vertex> e) {
        if (std::find(e.begin(), e.end(), i) == e.end()) return;
        double a = 0.0;
        for (Vertex j : e)
            if (j != i) a += v[j];
        total += a * a;
    });
    return total;
}

inline double sum_ae2_bound(std::uint32_t n, int d, std::span<const double> v) {
    return (d - 1) * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2))) * dot(v, v);
}

inline bool check_sum_ae2(std::uint32_t n, int d, Vertex i, std::span<const double> v) {
    const double bound = sum_ae2_bound(n, d, v);
    return sum_ae2_bruteforce(n, d, i, v) <= bound * (1.0 + 1e-12);
}

/// ||B_e v||_2 <= (d - 1) sqrt(sum_{j in e} v_j^2); B_e is materialized densely.
inline bool check_single_hyperedge(std::span<const Vertex> e, std::span<const double> v) {
    DenseMatrix b(v.size());
    add_comembership(b, e, 1.0);
    double restricted = 0.0;
    for (Vertex j : e) restricted += v[j] * v[j];
    const double bound = static_cast<double>(e.size() - 1) * std::sqrt(restricted);
    return norm2(b * v) <= bound * (1.0 + 1e-12);
}

/// ||u - u^(-m)||_2 <= sqrt(2) ||B^(m) u||_2 / delta_m. Inapplicable records pass vacuously.
inline bool check_davis_kahan(const LooRecord& r) {
    if (!r.dk_applicable) return true;
    return r.u_gap <= r.dk_bound * (1.0 + 1e-9) + 1e-12;
}

// ---- Monte Carlo concentration checks ---------------------------------------------

/// L_n = (26/3)(d - 1)(sqrt(p(1-p) C(n-2,d-2) log n) + log n).
inline double vector_radius(std::uint32_t n, int d, double p) {
    const double ln = std::log(static_cast<double>(n));
    const double c = static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
    return (26.0 / 3.0) * (d - 1) * (std::sqrt(p * (1.0 - p) * c * ln) + ln);
}

struct VectorRadiusReport {
    double radius = 0.0;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double max_value = 0.0;  ///< max ||W^(m) u^(-m)||_2 seen
    double frequency() const { return trials ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0; }
};

/// ||W^(m) u^(-m)||_2 for every m of one sample; u^(-m) from the dense oracle.
inline std::vector<double> loo_noise_action_norms(const HypergraphSample& sample) {
    if (sample.n() > 200) throw CapacityError("leave-one-out diagnostics require n <= 200");
    std::vector<double> out(sample.n());
    for (Vertex m = 0; m < sample.n(); ++m) {
        const auto w = loo_noise_part(sample, m);
        if (w.max_abs_row_sum() == 0.0) continue;
        auto um = dense_eig_oracle(leave_one_out(sample, m).m_minus).vector(0);
        out[m] = norm2(w * um);
    }
    return out;
}

inline VectorRadiusReport check_vector_radius(const ModelParams& params, int reps, std::uint64_t seed,
                                              unsigned workers = 1) {
    params.validate();
    if (reps < 1) throw ConfigError("reps must be positive");
    VectorRadiusReport r;
    r.radius = vector_radius(params.n, params.d, params.p);
    const auto per_rep = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        return loo_noise_action_norms(sample_hpc(params, mix64({seed, static_cast<std::uint64_t>(i)})));
    });
    for (const auto& norms : per_rep)
        for (double x : norms) {
            ++r.trials;
            r.max_value = std::max(r.max_value, x);
            if (x > r.radius) ++r.violations;
        }
    return r;
}

struct RowRadiusReport {
    double radius = 0.0;  ///< 8 R_n(u*)
    int reps = 0;
    int violations = 0;
    double max_value = 0.0;
};

/// Frequency of |(M - M*)_{i:} u*| > 8 R_n(u*) at a fixed row over fresh planted samples.
inline RowRadiusReport check_row_radius(const ModelParams& params, Vertex row, int reps, std::uint64_t seed,
                                        unsigned workers = 1) {
    params.validate();
    if (row >= params.n) throw ConfigError("row out of range");
    const auto pop = population_summary(params);
    RowRadiusReport r;
    r.reps = reps;
    if (pop.degenerate || params.k == 0) throw ConfigError("check_row_radius requires k >= d");
    std::vector<double> probe(params.n, 0.0);
    std::fill(probe.begin(), probe.begin() + params.k, pop.u_star_entry);
    r.radius = 8.0 * row_bernstein_radius(probe, params.n, params.d, params.p);
    const auto values = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        const auto sample = sample_hpc(params, mix64({seed, static_cast<std::uint64_t>(i)}));
        const auto a = project(sample);
        const auto us = u_star(sample.planted(), params.n);
        const CenteredOperator op(a, null_mean_offdiag(params));
        // M* u* = lambda* u*
        return std::abs((op * us)[row] - pop.lambda_star * us[row]);
    });
    for (double v : values) {
        r.max_value = std::max(r.max_value, v);
        if (v > r.radius) ++r.violations;
    }
    return r;
}

struct NullScalingReport {
    std::vector<std::uint32_t> ns;
    std::vector<double> max_ratio;  ///< per n: max ||M|| / sqrt(n C(n-2,d-2) p)
    double spread = 0.0;            ///< max over n / min over n
    bool ok(double factor = 1.5) const { return spread < factor; }
};

inline NullScalingReport null_concentration_scaling(const std::vector<std::uint32_t>& ns, int d, double p, int reps,
                                                    std::uint64_t seed, const SolverSettings& solver = {},
                                                    unsigned workers = 1) {
    if (ns.empty()) throw ConfigError("null_concentration_scaling: empty n grid");
    NullScalingReport r;
    r.ns = ns;
    for (std::size_t g = 0; g < ns.size(); ++g) {
        const auto ratios = null_ratios(ModelParams{ns[g], d, 0, p}, reps, mix64({seed, g}), solver, workers);
        r.max_ratio.push_back(*std::max_element(ratios.begin(), ratios.end()));
    }
    const auto [lo, hi] = std::minmax_element(r.max_ratio.begin(), r.max_ratio.end());
    r.spread = *hi / *lo;
    return r;
}

// ---- trend diagnostics: measured ratios only, no thresholds -----------------------

struct TrendDiagnostics {
    std::uint32_t n = 0;
    double lambda1_over_lambda_star = 0.0;  ///< lambda_1(M) / lambda*
    double delta0 = 0.0;                    ///< ||M - M*|| / lambda*
    double gap_over_lambda_star = 0.0;      ///< (lambda_1(M) - lambda_2(M)) / lambda*
};

inline TrendDiagnostics trend_diagnostics(const ModelParams& params, std::uint64_t seed) {
    if (params.n > 200) throw CapacityError("trend diagnostics require n <= 200");
    const auto pop = population_summary(params);
    if (pop.degenerate || !(pop.lambda_star > 0.0)) throw ConfigError("trend diagnostics need lambda* > 0");
    const auto sample = sample_hpc(params, seed);
    const auto m = centered_dense(sample);
    const auto spec = dense_eig_oracle(m);
    TrendDiagnostics t;
    t.n = params.n;
    t.lambda1_over_lambda_star = spec.values[0] / pop.lambda_star;
    t.gap_over_lambda_star = (spec.values[0] - spec.values[1]) / pop.lambda_star;
    t.delta0 = dense_spectral_norm(m - population_matrix(params, sample.planted())) / pop.lambda_star;
    return t;
}

// ---- selftest battery -------------------------------------------------------------

struct SelftestItem {
    std::string name;
    bool hard = true;  ///< soft items are trend diagnostics and never fail the run
    bool passed = true;
    std::size_t cases = 0;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestItem> items;
    bool ok() const {
        return std::all_of(items.begin(), items.end(), [](const SelftestItem& i) { return !i.hard || i.passed; });
    }
};

namespace detail {

inline DenseMatrix random_symmetric(std::size_t n, Rng& rng) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
    return m;
}

inline std::vector<double> random_vector(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

inline SelftestItem item(std::string name) {
    SelftestItem it;
    it.name = std::move(name);
    return it;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

}  // namespace detail

/**
 * Runs every checker on seeded random instances. `quick` shrinks the Monte Carlo
 * checks (replicate counts), not the deterministic ones.
 */
inline SelftestReport run_selftest(std::uint64_t seed, unsigned workers = 1, bool quick = false) {
    SelftestReport rep;
    auto add = [&](SelftestItem item) { rep.items.push_back(std::move(item)); };

    {
        SelftestItem it = detail::item("bernstein_excess_identity");
        double worst = 0.0;
        for (int a = 0; a < 22; ++a)
            for (int b = 0; b < 22; ++b)
                for (int c = 1; c <= 21; ++c) {
                    const BernsteinParams bp{a * 0.5, b * 0.25, c * 0.2};
                    const double t = bernstein_t(bp);
                    const double got = bernstein_excess(bp, t);
                    const double want = bernstein_excess_closed_form(bp);
                    worst = std::max(worst, std::abs(got - want) / std::max(1.0, t * t));
                    ++it.cases;
                }
        it.passed = worst <= 1e-12;
        it.detail = "max relative error " + detail::fmt(worst);
        add(it);
    }

    Rng rng(mix64({seed, 0x53454c46}));
    {
        SelftestItem it = detail::item("weyl");
        for (int t = 0; t < 100; ++t, ++it.cases) {
            const auto a = detail::random_symmetric(50, rng);
            const auto b = detail::random_symmetric(50, rng);
            it.passed = it.passed && check_weyl(a, b);
        }
        add(it);
    }
    {
        SelftestItem it = detail::item("cauchy_schwarz_row");
        for (int t = 0; t < 100; ++t, ++it.cases) {
            const auto m = detail::random_symmetric(30, rng);
            it.passed = it.passed && check_cauchy_schwarz_row(m, detail::random_vector(30, rng));
        }
        add(it);
    }
    {
        SelftestItem it = detail::item("sum_ae2");
        for (int t = 0; t < 100; ++t, ++it.cases) {
            const auto n = static_cast<std::uint32_t>(6 + rng.below(5));
            const int d = 3 + static_cast<int>(rng.below(2));
            it.passed = it.passed && check_sum_ae2(n, d, static_cast<Vertex>(rng.below(n)), detail::random_vector(n, rng));
        }
        add(it);
    }
    {
        SelftestItem it = detail::item("single_hyperedge");
        for (int t = 0; t < 100; ++t, ++it.cases) {
            const auto n = static_cast<std::uint32_t>(8 + rng.below(13));
            const auto d = static_cast<std::uint32_t>(3 + rng.below(6));
            it.passed = it.passed && check_single_hyperedge(rng.subset(n, std::min(d, n)), detail::random_vector(n, rng));
        }
        add(it);
    }
    {
        SelftestItem it = detail::item("leave_one_out");
        double worst_assembly = 0.0;
        for (int t = 0; t < 6; ++t) {
            const ModelParams params{40, 3, 12, 0.3};
            const auto sample = sample_hpc(params, mix64({seed, 0x4c4f4f, static_cast<std::uint64_t>(t)}));
            const auto ctx = make_loo_context(sample);
            for (Vertex m : {sample.planted().front(), static_cast<Vertex>(0), static_cast<Vertex>(39)}) {
                const auto r = loo_row_diagnostic(ctx, m);
                ++it.cases;
                worst_assembly = std::max({worst_assembly, r.assembly_error, r.decomposition_error});
                const bool p_ok = r.in_planted ? r.norm_p <= r.p_bound * (1.0 + 1e-9) : r.norm_p == 0.0;
                it.passed = it.passed && p_ok && r.row_m_max == 0.0 && check_davis_kahan(r);
            }
        }
        it.passed = it.passed && worst_assembly <= 1e-10;
        it.detail = "max assembly error " + detail::fmt(worst_assembly);
        add(it);
    }
    {
        SelftestItem it = detail::item("vector_radius");
        const auto r = check_vector_radius(ModelParams{60, 3, 20, 0.3}, quick ? 5 : 50, mix64({seed, 0x564543}), workers);
        it.cases = r.trials;
        it.passed = r.violations == 0;
        it.detail = "violations " + std::to_string(r.violations) + ", max " + detail::fmt(r.max_value) + " vs radius " +
                    detail::fmt(r.radius);
        add(it);
    }
    {
        SelftestItem it = detail::item("row_radius");
        const auto r = check_row_radius(ModelParams{100, 3, 20, 0.5}, 0, quick ? 50 : 500, mix64({seed, 0x524f57}), workers);
        it.cases = static_cast<std::size_t>(r.reps);
        it.passed = r.violations == 0;
        it.detail = "violations " + std::to_string(r.violations) + ", max " + detail::fmt(r.max_value) + " vs radius " +
                    detail::fmt(r.radius);
        add(it);
    }
    {
        SelftestItem it = detail::item("null_concentration_scaling");
        const auto r = null_concentration_scaling({50, 100, 200}, 3, 0.5, quick ? 10 : 100, mix64({seed, 0x4e554c}), {}, workers);
        it.cases = r.ns.size();
        it.passed = r.ok();
        it.detail = "spread " + detail::fmt(r.spread);
        add(it);
    }
    for (std::uint32_t n : {50u, 100u, 200u}) {
        SelftestItem it = detail::item("trend_n" + std::to_string(n));
        it.hard = false;
        const auto k = static_cast<std::uint32_t>(std::ceil(2.0 * recovery_scale(n, 3, 0.5)));
        const auto t = trend_diagnostics(ModelParams{n, 3, k, 0.5}, mix64({seed, 0x54524e, n}));
        it.cases = 1;
        it.detail = "lambda1/lambda* " + detail::fmt(t.lambda1_over_lambda_star) + ", delta0 " + detail::fmt(t.delta0) +
                    ", gap/lambda* " + detail::fmt(t.gap_over_lambda_star);
        add(it);
    }
    return rep;
}

inline std::string selftest_text(const SelftestReport& r) {
    std::ostringstream os;
    for (const auto& i : r.items) {
        os << (i.hard ? (i.passed ? "PASS  " : "FAIL  ") : "TREND ") << i.name << " (" << i.cases << " cases)";
        if (!i.detail.empty()) os << ": " << i.detail;
        os << '\n';
    }
    os << (r.ok() ? "selftest: all hard checks passed\n" : "selftest: FAILED\n");
    return os.str();
}

inline std::string selftest_csv(const SelftestReport& r) {
    std::ostringstream os;
    os << "name,kind,passed,cases,detail\n";
    for (const auto& i : r.items) {
        std::string d = i.detail;
        std::replace(d.begin(), d.end(), ',', ';');
        os << i.name << ',' << (i.hard ? "hard" : "trend") << ',' << (i.passed ? 1 : 0) << ',' << i.cases << ',' << d << '\n';
    }
    return os.str();
}

}  // namespace hcl
