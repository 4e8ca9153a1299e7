// Acceptance suite: one PASS/FAIL line per criterion, with wall time against its budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hcl/hcl.hpp"

using namespace hcl;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

DenseMatrix random_symmetric(std::size_t n, Rng& rng) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
    return m;
}

HypergraphSample one_based(std::uint32_t n, int d, const std::vector<std::vector<Vertex>>& edges) {
    std::vector<Vertex> flat;
    for (const auto& e : edges)
        for (Vertex v : e) flat.push_back(v - 1);
    return HypergraphSample(ModelParams{n, d, 0, 0.0}, {}, flat);
}

Outcome golden_projection() {
    static const std::uint64_t golden[8][8] = {
        {0, 2, 1, 1, 1, 1, 0, 0}, {2, 0, 1, 1, 1, 1, 0, 0}, {1, 1, 0, 0, 1, 1, 1, 1}, {1, 1, 0, 0, 1, 1, 1, 1},
        {1, 1, 1, 1, 0, 0, 1, 1}, {1, 1, 1, 1, 0, 0, 1, 1}, {0, 0, 1, 1, 1, 1, 0, 2}, {0, 0, 1, 1, 1, 1, 2, 0}};
    const auto h1 = one_based(8, 4, {{1, 2, 3, 5}, {1, 2, 4, 6}, {3, 6, 7, 8}, {4, 5, 7, 8}});
    const auto h2 = one_based(8, 4, {{1, 2, 3, 6}, {1, 2, 4, 5}, {3, 5, 7, 8}, {4, 6, 7, 8}});
    const auto a1 = project(h1);
    const auto a2 = project(h2);
    int mismatches = 0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) mismatches += a1(i, j) != golden[i][j];
    const bool same = a1 == a2;
    return {mismatches == 0 && same, std::to_string(mismatches) + " mismatches, projections identical=" + (same ? "1" : "0")};
}

Outcome quadratic_form_identity() {
    Rng rng(101);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = 3 + static_cast<int>(rng.below(2));
        const auto n = static_cast<std::uint32_t>(d + 1 + rng.below(40 - d));
        const ModelParams params{n, d, static_cast<std::uint32_t>(rng.below(n + 1)), rng.uniform01()};
        const auto sample = sample_hpc(params, rng.next());
        const auto tset = rng.subset(n, static_cast<std::uint32_t>(1 + rng.below(n)));
        const double mat = quadratic_form_stat(CenteredOperator(project(sample), null_mean_offdiag(params)), tset);
        const double hyp = quadratic_form_hyperedge(sample, tset);
        worst = std::max(worst, std::abs(mat - hyp) / std::max(1.0, std::abs(hyp)));
    }
    return {worst <= 1e-9, fmt("max relative difference %.3g over 100 instances", worst)};
}

Outcome counting_identity() {
    int cases = 0, bad = 0;
    for (int d : {3, 4})
        for (int n = d; n <= 10; ++n)
            for (int k0 = d; k0 <= n; ++k0) {
                std::vector<Vertex> t(static_cast<std::size_t>(k0));
                for (int i = 0; i < k0; ++i) t[i] = static_cast<Vertex>(i);
                const auto mask = vertex_mask(t, static_cast<std::uint32_t>(n));
                std::uint64_t brute = 0;
                for_each_dset(static_cast<std::uint32_t>(n), d, [&](std::span<const Vertex> e) {
                    if (!is_subset(e, mask)) brute += c_e(e, mask);
                });
                ++cases;
                bad += brute != sum_ce_out_closed_form(n, k0, d);
            }
    return {bad == 0, std::to_string(bad) + " mismatches over " + std::to_string(cases) + " (n, k0, d)"};
}

Outcome population_spectrum() {
    const std::vector<ModelParams> grid = {
        {10, 3, 3, 0.5},  {10, 3, 6, 0.1},  {20, 3, 10, 0.9}, {20, 4, 4, 0.3},  {30, 4, 12, 0.5}, {30, 5, 9, 0.2},
        {40, 3, 25, 0.7}, {40, 6, 10, 0.4}, {50, 4, 20, 0.05}, {60, 3, 60, 0.5}, {60, 5, 15, 0.8}, {80, 3, 30, 0.25}};
    Rng rng(202);
    double worst = 0.0;
    bool lambda_ok = true;
    for (const auto& params : grid) {
        const auto s = rng.subset(params.n, params.k);
        const auto spec = dense_eig_oracle(population_matrix(params, s));
        const auto pop = population_summary(params);
        const double w = pop.w_in - pop.w_out;
        std::vector<double> want;
        want.push_back(w * (params.k - 1));
        for (std::uint32_t i = 0; i < params.n - params.k; ++i) want.push_back(0.0);
        for (std::uint32_t i = 0; i + 1 < params.k; ++i) want.push_back(-w);
        for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(spec.values[i] - want[i]));
        // (1-p)(k-1)C(k-2,d-2), with the binomial by the multiplicative formula
        double c = 1.0;
        for (int j = 1; j <= params.d - 2; ++j) c = c * (params.k - 2 - (params.d - 2) + j) / j;
        const double closed = (1.0 - params.p) * (params.k - 1) * c;
        lambda_ok = lambda_ok && std::abs(pop.lambda_star - closed) <= 1e-9 * closed &&
                    std::abs(spec.values[0] - closed) <= 1e-8 * std::max(1.0, closed);
    }
    return {worst <= 1e-8 && lambda_ok, fmt("max eigenvalue error %.3g over 12 grid points", worst) +
                                            (lambda_ok ? ", lambda* matches" : ", lambda* MISMATCH")};
}

Outcome eigensolver_oracle() {
    Rng rng(303);
    double worst = 0.0;
    int unconverged = 0;
    for (std::size_t n : {10u, 50u, 100u})
        for (int t = 0; t < 50; ++t) {
            const auto m = random_symmetric(n, rng);
            const auto spec = dense_eig_oracle(m);
            const auto top = leading_algebraic_eigenpair(m, {}, rng.next());
            unconverged += !top.converged;
            const double norm = spectral_norm(m, {}, rng.next());
            const double top_ref = spec.values.front();
            const double norm_ref = std::max(std::abs(spec.values.front()), std::abs(spec.values.back()));
            worst = std::max({worst, std::abs(top.value - top_ref) / std::abs(top_ref),
                              std::abs(norm - norm_ref) / norm_ref});
        }
    return {worst <= 1e-8 && unconverged == 0, fmt("max relative error %.3g over 150 matrices", worst)};
}

Outcome bernstein_grid() {
    double worst = 0.0;
    int cases = 0;
    for (int a = 0; a < 25; ++a)
        for (int b = 0; b < 20; ++b)
            for (int c = 1; c <= 20; ++c) {
                const BernsteinParams bp{0.37 * a * a, 0.5 * b, 0.15 * c};
                const double t = bernstein_t(bp);
                const double err = std::abs(bernstein_excess(bp, t) - bernstein_excess_closed_form(bp));
                // relative to t^2, the magnitude of the cancelling terms
                worst = std::max(worst, err / std::max(1.0, t * t));
                ++cases;
            }
    return {worst <= 1e-12, fmt("max relative error %.3g over %.0f triples", worst, cases)};
}

Outcome hyperedge_bounds() {
    Rng rng(404);
    int bad_edge = 0, bad_sum = 0;
    for (int t = 0; t < 100; ++t) {
        const auto d = static_cast<std::uint32_t>(3 + rng.below(6));
        const auto n = static_cast<std::uint32_t>(d + rng.below(25));
        std::vector<double> v(n);
        for (auto& x : v) x = rng.normal();
        bad_edge += !check_single_hyperedge(rng.subset(n, d), v);
    }
    for (int t = 0; t < 100; ++t) {
        const int d = 3 + static_cast<int>(rng.below(3));
        const auto n = static_cast<std::uint32_t>(d + 1 + rng.below(10));
        std::vector<double> v(n);
        for (auto& x : v) x = rng.normal();
        bad_sum += !check_sum_ae2(n, d, static_cast<Vertex>(rng.below(n)), v);
    }
    return {bad_edge == 0 && bad_sum == 0,
            fmt("single-hyperedge violations %.0f/100, sum a_e^2 violations %.0f/100", bad_edge, bad_sum)};
}

Outcome null_scaling() {
    const auto r = null_concentration_scaling({50, 100, 200}, 3, 0.5, 100, 505);
    return {r.ok(1.5), fmt("max ratios %.4f, %.4f, %.4f", r.max_ratio[0], r.max_ratio[1], r.max_ratio[2]) +
                           fmt("; spread %.4f < 1.5", r.spread)};
}

Outcome detection_power() {
    const ModelParams null{200, 3, 0, 0.5};
    const double c = calibrate_C(null, 0.05, 200, 606);
    const auto risk = estimate_risk(null, 60, c, 50, 607);
    return {risk.type1 <= 0.10 && risk.type2 <= 0.10,
            fmt("C = %.4f; type-I %.3f, type-II %.3f", c, risk.type1, risk.type2)};
}

Outcome exact_recovery() {
    const ModelParams params{300, 3, 90, 0.5};
    int exact = 0, sep_fail = 0;
    double worst_sep = 0.0;
    for (std::size_t r = 0; r < 20; ++r) {
        const auto rs = replicate_seed(707, 0, r);
        const auto sample = sample_hpc(params, mix64({rs, 1}));
        const auto a = project(sample);
        auto o = spectral_recover(a, 90, 3, 0.5, {}, mix64({rs, 2}));
        score(o, sample.planted());
        if (!o.exact) continue;
        ++exact;
        const auto pd = proxy_diagnostics(a, sample.planted(), params, o.eigen.vector);
        sep_fail += !pd.sep_ok;
        worst_sep = std::max(worst_sep, (pd.alpha_n + pd.beta_n) * 2.0 * std::sqrt(90.0));
    }
    return {exact >= 19 && sep_fail == 0,
            fmt("exact %.0f/20; sep_ok failures %.0f; max (alpha+beta)*2sqrt(k) = %.4f", exact, sep_fail, worst_sep)};
}

Outcome coupling() {
    Rng rng(808);
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        const std::uint32_t n = 30;
        const int d = 3 + static_cast<int>(rng.below(2));
        const double p = rng.uniform01();
        const auto s = rng.subset(n, static_cast<std::uint32_t>(d + rng.below(10)));
        const std::vector<Vertex> tset(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(1 + rng.below(s.size())));
        const auto c = sample_coupled(n, d, p, s, tset, rng.next());
        const double mu = p * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
        const double qs = quadratic_form_stat(CenteredOperator(project(c.with_s), mu), tset);
        const double qt = quadratic_form_stat(CenteredOperator(project(c.with_t), mu), tset);
        violations += qs < qt - 1e-9;
    }
    return {violations == 0, std::to_string(violations) + " violations over 200 coupled draws"};
}

Outcome leave_one_out_consistency() {
    Rng rng(909);
    double worst_b = 0.0, worst_dec = 0.0, worst_row = 0.0, worst_p_ratio = 0.0, worst_out = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<std::uint32_t>(40 + rng.below(61));
        const int d = 3 + static_cast<int>(rng.below(2));
        const ModelParams params{n, d, static_cast<std::uint32_t>(n / 4 + rng.below(n / 4)), rng.uniform(0.1, 0.7)};
        const auto sample = sample_hpc(params, rng.next());
        const auto ctx = make_loo_context(sample);
        const Vertex in_s = sample.planted()[rng.below(params.k)];
        Vertex out_s = 0;
        do out_s = static_cast<Vertex>(rng.below(n));
        while (sample.in_planted(out_s));
        for (Vertex m : {in_s, out_s}) {
            const auto loo = leave_one_out(sample, m);
            worst_b = std::max(worst_b, (ctx.m - loo.m_minus).max_abs_diff(loo_perturbation_hyperedge_sum(sample, m)));
            const auto r = loo_row_diagnostic(ctx, m);
            worst_dec = std::max(worst_dec, r.decomposition_error);
            worst_row = std::max(worst_row, r.row_m_max);
            if (r.in_planted) worst_p_ratio = std::max(worst_p_ratio, r.norm_p / r.p_bound);
            else worst_out = std::max(worst_out, loo_planted_part(sample, m).frobenius());
        }
    }
    const bool ok = worst_b <= 1e-9 && worst_dec <= 1e-9 && worst_row == 0.0 && worst_p_ratio <= 1.0 + 1e-9 &&
                    worst_out == 0.0;
    return {ok, fmt("max |B - (M - M^-m)| %.3g, max |B - (P + W)| %.3g", worst_b, worst_dec) +
                    fmt(", max ||P||/bound %.4f, ||P|| outside S %.3g", worst_p_ratio, worst_out)};
}

Outcome determinism() {
    std::vector<ExperimentSpec> specs(4);
    specs[0].mode = Mode::detect;
    specs[0].n_grid = {60};
    specs[0].k_grid = {0, 25};
    specs[0].calibration_reps = 50;
    specs[1].mode = Mode::recover;
    specs[1].n_grid = {80, 120};
    specs[1].k_grid = {30};
    specs[2].mode = Mode::calibrate;
    specs[2].n_grid = {60};
    specs[3].mode = Mode::phase;
    specs[3].n_grid = {60, 100};
    specs[3].k_relative = true;
    specs[3].k_grid = {1, 2, 3};
    int differing = 0;
    for (auto& s : specs) {
        s.reps = 8;
        s.master_seed = 1313;
        std::string ref;
        for (int w : {1, 4}) {
            s.workers = w;
            const auto res = run_experiment(s);
            const auto csv = emit_csv(res.records) + emit_summary_csv(res);
            if (ref.empty()) ref = csv;
            else differing += csv != ref;
        }
        // a second run with the same seed and worker count
        differing += emit_csv(run_experiment(s).records) + emit_summary_csv(run_experiment(s)) != ref;
    }
    const auto a = null_ratios(ModelParams{100, 3, 0, 0.5}, 20, 5, {}, 1);
    const auto b = null_ratios(ModelParams{100, 3, 0, 0.5}, 20, 5, {}, 4);
    differing += a != b;
    return {differing == 0, std::to_string(differing) + " differing outputs across workers {1,4} and repeats"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "golden_projection_fixture", 0.001, golden_projection},
        {2, "quadratic_form_identity", 5, quadratic_form_identity},
        {3, "counting_identity", 5, counting_identity},
        {4, "population_spectrum", 5, population_spectrum},
        {5, "eigensolver_oracle_equivalence", 30, eigensolver_oracle},
        {6, "bernstein_parameter_inequality", 1, bernstein_grid},
        {7, "single_hyperedge_and_sum_ae2_bounds", 5, hyperedge_bounds},
        {8, "null_concentration_scaling", 120, null_scaling},
        {9, "detection_power", 180, detection_power},
        {10, "exact_recovery", 300, exact_recovery},
        {11, "coupling_monotonicity", 10, coupling},
        {12, "leave_one_out_consistency", 60, leave_one_out_consistency},
        {13, "determinism", 600, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool ok = o.passed && in_time;
        failures += !ok;
        std::printf("%s %2d %s (%.3fs / %gs%s): %s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                    in_time ? "" : " OVER BUDGET", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
