#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "hcl/combinatorics.hpp"
#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"

namespace hcl {

/// (p / (1 - p))^{1/(2(d-1))} sqrt(n): the planted-size scale for exact spectral recovery.
inline double recovery_scale(std::uint32_t n, int d, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("recovery_scale requires 0 < p < 1");
    return std::pow(p / (1.0 - p), 1.0 / (2.0 * static_cast<double>(d - 1))) * std::sqrt(static_cast<double>(n));
}

/// Indices of the k largest |u_i|, ties to the lowest index, returned in increasing order.
inline std::vector<Vertex> top_k_by_magnitude(std::span<const double> u, std::uint32_t k) {
    if (k > u.size()) throw ConfigError("top_k_by_magnitude: k exceeds dimension");
    std::vector<Vertex> idx(u.size());
    std::iota(idx.begin(), idx.end(), Vertex{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Vertex a, Vertex b) { return std::abs(u[a]) > std::abs(u[b]); });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// How the null mean E_0[A] is formed before taking the leading eigenvector.
enum class Centering {
    known_p,     ///< p supplied by the caller
    estimated_p  ///< plug-in p-hat from the total edge mass (not part of the analysed algorithm)
};

/// p-hat = sum_{i<j} A_ij / (C(n,2) C(n-2,d-2)).
inline double estimate_p(const AdjacencyMatrix& a, int d) {
    const auto n = a.dim();
    const double denom = static_cast<double>(binom(n, 2)) * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
    return static_cast<double>(a.upper_sum()) / denom;
}

struct RecoveryOutcome {
    std::vector<Vertex> s_hat;
    EigenPair eigen;
    bool exact = false;
    double overlap = 0.0;  ///< |S_hat ∩ S| / k, filled by score()
    double p_used = 0.0;
};

/**
 * Leading eigenvector u of A - E_0[A], then the k largest |u_i|.
 * The output does not depend on the sign of u. Throws SolverError on non-convergence.
 */
inline RecoveryOutcome spectral_recover(const AdjacencyMatrix& a, std::uint32_t k, int d, double p,
                                        const SolverSettings& settings, std::uint64_t seed,
                                        Centering centering = Centering::known_p) {
    const auto n = a.dim();
    if (k < 1 || k > n) throw ConfigError("spectral_recover requires 1 <= k <= n");
    RecoveryOutcome out;
    out.p_used = centering == Centering::known_p ? p : estimate_p(a, d);
    const double mu = out.p_used * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
    CenteredOperator op(a, mu);
    out.eigen = leading_algebraic_eigenpair(op, settings, seed);
    if (!out.eigen.converged)
        throw SolverError("spectral_recover: eigensolver did not converge (residual " + std::to_string(out.eigen.residual) + ")");
    out.s_hat = top_k_by_magnitude(out.eigen.vector, k);
    return out;
}

/// Fills exact and overlap against the true planted set.
inline void score(RecoveryOutcome& outcome, std::span<const Vertex> truth) {
    std::vector<Vertex> inter;
    std::set_intersection(outcome.s_hat.begin(), outcome.s_hat.end(), truth.begin(), truth.end(), std::back_inserter(inter));
    outcome.overlap = truth.empty() ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(truth.size());
    outcome.exact = inter.size() == truth.size() && outcome.s_hat.size() == truth.size();
}

struct ProxyDiagnostics {
    double alpha_n = 0.0;  ///< ||M u*/lambda* - u*||_inf
    double beta_n = 0.0;   ///< ||u - M u*/lambda*||_inf, u aligned with u*
    bool sep_ok = false;   ///< alpha_n + beta_n < 1 / (2 sqrt(k))
};

/// One-step proxy distances for a given leading eigenvector u of M. Simulation mode only (S known).
inline ProxyDiagnostics proxy_diagnostics(const AdjacencyMatrix& a, std::span<const Vertex> planted,
                                          const ModelParams& params, std::span<const double> u) {
    const auto pop = population_summary(params);
    if (pop.degenerate || !(pop.lambda_star > 0.0))
        throw ConfigError("proxy_diagnostics: lambda* = 0 (k < d or p = 1)");
    const auto us = u_star(planted, params.n);
    CenteredOperator op(a, null_mean_offdiag(params));
    auto proxy = op * us;
    for (double& v : proxy) v /= pop.lambda_star;
    std::vector<double> aligned(u.begin(), u.end());
    align_sign(aligned, us);
    ProxyDiagnostics out;
    for (std::size_t i = 0; i < us.size(); ++i) {
        out.alpha_n = std::max(out.alpha_n, std::abs(proxy[i] - us[i]));
        out.beta_n = std::max(out.beta_n, std::abs(aligned[i] - proxy[i]));
    }
    out.sep_ok = out.alpha_n + out.beta_n < 0.5 / std::sqrt(static_cast<double>(params.k));
    return out;
}

inline ProxyDiagnostics proxy_diagnostics(const AdjacencyMatrix& a, std::span<const Vertex> planted,
                                          const ModelParams& params, const SolverSettings& settings, std::uint64_t seed) {
    CenteredOperator op(a, null_mean_offdiag(params));
    const auto eig = leading_algebraic_eigenpair(op, settings, seed);
    if (!eig.converged) throw SolverError("proxy_diagnostics: eigensolver did not converge");
    return proxy_diagnostics(a, planted, params, eig.vector);
}

/// Row Bernstein radius V_n ||v||_2 + K_n ||v||_inf with V_n = sqrt(p(1-p)(d-1)C(n-2,d-2) log n), K_n = (d-1) log n.
inline double row_bernstein_radius(std::span<const double> v, std::uint32_t n, int d, double p) {
    const double ln = std::log(static_cast<double>(n));
    const double vn = std::sqrt(p * (1.0 - p) * (d - 1) * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2))) * ln);
    const double kn = (d - 1) * ln;
    return vn * norm2(v) + kn * norm_inf(v);
}

/// Dense quantities shared by every leave-one-out diagnostic of one sample.
struct LooContext {
    const HypergraphSample* sample = nullptr;
    DenseMatrix m;
    double lambda = 0.0;        ///< lambda_1(M)
    std::vector<double> u;      ///< leading eigenvector of M, aligned with u*
    PopulationSummary pop;
};

inline LooContext make_loo_context(const HypergraphSample& sample) {
    if (sample.n() > 200) throw CapacityError("leave-one-out diagnostics require n <= 200");
    LooContext ctx;
    ctx.sample = &sample;
    ctx.m = centered_dense(sample);
    const auto spec = dense_eig_oracle(ctx.m);
    ctx.lambda = spec.values.front();
    ctx.u = spec.vector(0);
    ctx.pop = population_summary(sample.params());
    if (!sample.planted().empty()) align_sign(ctx.u, u_star(sample.planted(), sample.n()));
    else apply_sign_convention(ctx.u);
    return ctx;
}

struct LooRecord {
    Vertex m = 0;
    bool in_planted = false;
    double norm_b = 0.0;
    double norm_p = 0.0;
    double norm_w = 0.0;
    double norm_w_u_minus = 0.0;  ///< ||W^(m) u^(-m)||_2
    double norm_b_u = 0.0;        ///< ||B^(m) u||_2
    double delta_m = 0.0;         ///< min_{i>=2} |lambda_i(M^(-m)) - lambda|
    double u_gap = 0.0;           ///< ||u - u^(-m)||_2
    std::vector<double> u_minus;  ///< leading eigenvector of M^(-m), <u^(-m), u> >= 0

    double assembly_error = 0.0;       ///< max |(M - M^(-m)) - sum_{e∋m}(H_e - p)B_e|
    double decomposition_error = 0.0;  ///< max |B^(m) - (P^(m) + W^(m))|
    double row_m_max = 0.0;            ///< max |M^(-m)_{m:}|
    double p_bound = 0.0;              ///< 2 d lambda* ||u*||_inf
    double p_intermediate_bound = 0.0; ///< d a_k sqrt(k), a_k = (1-p) C(k-2, d-2)
    bool dk_applicable = false;        ///< delta_m > 0 and lambda_1(M^(-m)) simple
    double dk_bound = 0.0;             ///< sqrt(2) ||B^(m) u||_2 / delta_m
};

/**
 * Leave-one-out record for vertex m. All quantities come from dense materializations
 * and oracle spectra; B^(m) is assembled twice (as M - M^(-m) and as a hyperedge sum).
 */
inline LooRecord loo_row_diagnostic(const LooContext& ctx, Vertex m, const SolverSettings& settings = {}) {
    const auto& sample = *ctx.sample;
    const auto n = sample.n();
    if (m >= n) throw ConfigError("vertex out of range");
    const auto& params = sample.params();
    LooRecord r;
    r.m = m;
    r.in_planted = sample.in_planted(m);

    const auto loo = leave_one_out(sample, m);
    const auto b_sum = loo_perturbation_hyperedge_sum(sample, m);
    const auto pm = loo_planted_part(sample, m);
    const auto wm = loo_noise_part(sample, m);
    r.assembly_error = loo.b.max_abs_diff(b_sum);
    r.decomposition_error = loo.b.max_abs_diff(pm + wm);
    for (double v : loo.m_minus.row(m)) r.row_m_max = std::max(r.row_m_max, std::abs(v));

    const std::uint64_t seed = mix64({static_cast<std::uint64_t>(m), 0x4c4f4fULL});
    r.norm_b = spectral_norm(loo.b, settings, mix64({seed, 1}));
    r.norm_p = pm.max_abs_row_sum() == 0.0 ? 0.0 : spectral_norm(pm, settings, mix64({seed, 2}));
    r.norm_w = wm.max_abs_row_sum() == 0.0 ? 0.0 : spectral_norm(wm, settings, mix64({seed, 3}));

    const auto spec = dense_eig_oracle(loo.m_minus);
    r.u_minus = spec.vector(0);
    align_sign(r.u_minus, ctx.u);
    r.norm_w_u_minus = norm2(wm * r.u_minus);
    r.norm_b_u = norm2(loo.b * ctx.u);
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < spec.values.size(); ++i) delta = std::min(delta, std::abs(spec.values[i] - ctx.lambda));
    r.delta_m = delta;
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = ctx.u[i] - r.u_minus[i];
    r.u_gap = norm2(diff);
    const double scale = std::max(1.0, std::abs(spec.values.front()));
    const bool simple = spec.values.size() < 2 || spec.values[0] - spec.values[1] > 1e-9 * scale;
    r.dk_applicable = delta > 0.0 && simple;
    if (r.dk_applicable) r.dk_bound = std::sqrt(2.0) * r.norm_b_u / delta;

    if (!ctx.pop.degenerate) {
        r.p_bound = 2.0 * params.d * ctx.pop.lambda_star * ctx.pop.u_star_entry;
        const double ak = (1.0 - params.p) * static_cast<double>(binom(params.k - 2, static_cast<std::uint64_t>(params.d - 2)));
        r.p_intermediate_bound = params.d * ak * std::sqrt(static_cast<double>(params.k));
    }
    return r;
}

}  // namespace hcl
