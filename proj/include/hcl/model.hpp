#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcl/combinatorics.hpp"
#include "hcl/dense.hpp"
#include "hcl/errors.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// Largest n accepted anywhere; keeps every binomial used below 2^63.
inline constexpr std::uint32_t kMaxVertices = 1000;

/// Sampler refuses when the expected number of explicit hyperedges exceeds this.
inline constexpr double kMaxExpectedEdges = 2e8;

struct ModelParams {
    std::uint32_t n = 0;
    int d = 3;
    std::uint32_t k = 0;  ///< planted size; 0 is the null model
    double p = 0.0;

    /// Throws ConfigError unless 3 <= d <= min(n, 8), k <= n, n <= 1000 and p in [0, 1].
    void validate() const {
        if (d < 3 || d > kMaxEdgeSize) throw ConfigError("d must lie in [3, 8]");
        if (n < static_cast<std::uint32_t>(d)) throw ConfigError("need d <= n");
        if (n > kMaxVertices) throw ConfigError("n exceeds the supported maximum of 1000");
        if (k > n) throw ConfigError("need k <= n");
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
    }

    /// 0 < k < d: no d-set fits inside S, so the law equals the null.
    bool planted_degenerate() const { return k < static_cast<std::uint32_t>(d); }

    std::uint64_t pair_multiplicity() const { return binom(n - 2, static_cast<std::uint64_t>(d - 2)); }
};

/**
 * One draw of HPC(n, d, k, p): the planted set and the explicit list of present
 * non-planted hyperedges. Planted hyperedges (all d-subsets of S) are implicit.
 * Hyperedges are stored flat, d ids per edge.
 */
class HypergraphSample {
public:
    HypergraphSample() = default;

    struct Trusted {};

    /// Skips validation; the caller guarantees sorted S and distinct valid non-planted edges.
    HypergraphSample(Trusted, ModelParams params, std::vector<Vertex> planted, std::vector<Vertex> out_vertices)
        : params_(params), planted_(std::move(planted)), out_(std::move(out_vertices)) {
        mask_ = vertex_mask(planted_, params_.n);
    }

    /// Validates S and the edge list; throws ConfigError on any violated invariant.
    HypergraphSample(ModelParams params, std::vector<Vertex> planted, std::vector<Vertex> out_vertices)
        : params_(params), planted_(std::move(planted)), out_(std::move(out_vertices)) {
        params_.validate();
        if (planted_.size() != params_.k) throw ConfigError("planted set size differs from k");
        if (!std::is_sorted(planted_.begin(), planted_.end()) ||
            std::adjacent_find(planted_.begin(), planted_.end()) != planted_.end())
            throw ConfigError("planted set must be strictly increasing");
        mask_ = vertex_mask(planted_, params_.n);
        const auto d = static_cast<std::size_t>(params_.d);
        if (out_.size() % d != 0) throw ConfigError("edge storage is not a multiple of d");
        std::vector<std::uint64_t> ranks;
        ranks.reserve(edge_count());
        for (std::size_t i = 0; i < edge_count(); ++i) {
            auto e = edge(i);
            if (!is_valid_dset(e, params_.n, params_.d)) throw ConfigError("invalid hyperedge");
            if (is_subset(e, mask_)) throw ConfigError("explicit hyperedge lies inside the planted set");
            ranks.push_back(rank_dset(e, params_.n, params_.d));
        }
        std::sort(ranks.begin(), ranks.end());
        if (std::adjacent_find(ranks.begin(), ranks.end()) != ranks.end())
            throw ConfigError("duplicate hyperedge");
    }

    const ModelParams& params() const { return params_; }
    std::uint32_t n() const { return params_.n; }
    int d() const { return params_.d; }
    std::span<const Vertex> planted() const { return planted_; }
    const std::vector<char>& planted_mask() const { return mask_; }
    bool in_planted(Vertex v) const { return mask_[v] != 0; }

    std::size_t edge_count() const { return out_.size() / static_cast<std::size_t>(params_.d); }
    std::span<const Vertex> edge(std::size_t i) const {
        const auto d = static_cast<std::size_t>(params_.d);
        return {out_.data() + i * d, d};
    }
    std::span<const Vertex> edge_storage() const { return out_; }

private:
    ModelParams params_;
    std::vector<Vertex> planted_;
    std::vector<Vertex> out_;
    std::vector<char> mask_;
};

/// Symmetric co-occurrence counts with zero diagonal.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::uint32_t n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {}

    std::uint32_t dim() const { return n_; }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::uint64_t& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    std::span<const std::uint64_t> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }

    void add_pair(Vertex i, Vertex j, std::uint64_t w = 1) {
        a_[static_cast<std::size_t>(i) * n_ + j] += w;
        a_[static_cast<std::size_t>(j) * n_ + i] += w;
    }

    /// Symmetric, zero diagonal, and every entry at most C(n-2, d-2).
    bool satisfies_invariants(int d) const {
        const std::uint64_t cap = n_ >= 2 ? binom(n_ - 2, static_cast<std::uint64_t>(d - 2)) : 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if ((*this)(i, i) != 0) return false;
            for (std::size_t j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i) || (*this)(i, j) > cap) return false;
        }
        return true;
    }

    DenseMatrix to_dense() const {
        DenseMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
        return m;
    }

    /// Sum over i < j of A_ij.
    std::uint64_t upper_sum() const {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) s += (*this)(i, j);
        return s;
    }

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    std::uint32_t n_ = 0;
    std::vector<std::uint64_t> a_;
};

/**
 * Samples the non-planted hyperedges for a fixed planted set: every d-set not inside S is
 * present independently with probability p. Ranks are visited in colex order with geometric
 * skips, so the cost is proportional to the number of present edges.
 */
inline HypergraphSample sample_hpc_given(const ModelParams& params, std::vector<Vertex> planted, Rng& rng) {
    params.validate();
    std::sort(planted.begin(), planted.end());
    if (planted.size() != params.k || std::adjacent_find(planted.begin(), planted.end()) != planted.end())
        throw ConfigError("planted set must contain k distinct vertices");
    if (params.p * binom_real(params.n, static_cast<std::uint64_t>(params.d)) > kMaxExpectedEdges)
        throw CapacityError("expected hyperedge count p*C(n,d) exceeds 2e8; use a smaller n");
    // p = 0 never enumerates, so C(n, d) beyond 64 bits is harmless there
    const std::uint64_t total = params.p > 0.0 ? binom(params.n, static_cast<std::uint64_t>(params.d)) : 0;
    const auto mask = vertex_mask(planted, params.n);
    const auto d = static_cast<std::size_t>(params.d);
    BinomialTable table(params.p > 0.0 ? params.n : 0, params.d);
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(params.p * static_cast<double>(total) * 1.05 + 16) * d);
    std::vector<Vertex> e(d);

    auto keep = [&](std::uint64_t r) {
        unrank_dset_into(r, params.d, table, e);
        if (!is_subset(e, mask)) out.insert(out.end(), e.begin(), e.end());
    };

    if (params.p >= 1.0) {
        for (std::uint64_t r = 0; r < total; ++r) keep(r);
    } else if (params.p > 0.0) {
        const double log_q = std::log1p(-params.p);
        std::uint64_t r = 0;
        while (true) {
            const double u = 1.0 - rng.uniform01();  // (0, 1]
            const double gap = std::floor(std::log(u) / log_q);
            if (gap >= static_cast<double>(total - r)) break;
            r += static_cast<std::uint64_t>(gap);
            keep(r);
            if (++r >= total) break;
        }
    }
    return HypergraphSample(HypergraphSample::Trusted{}, params, std::move(planted), std::move(out));
}

/// Draws S uniformly among k-subsets, then the non-planted hyperedges. Deterministic in (params, seed).
inline HypergraphSample sample_hpc(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    Rng rng(mix64({seed, 0x48504351ULL}));
    auto planted = rng.subset(params.n, params.k);
    return sample_hpc_given(params, std::move(planted), rng);
}

/// ER(n, d, p): the null model.
inline HypergraphSample sample_er(std::uint32_t n, int d, double p, std::uint64_t seed) {
    return sample_hpc(ModelParams{n, d, 0, p}, seed);
}

/**
 * Co-membership projection. Explicit edges add one to each covered pair; each planted pair
 * {i, j} ⊆ S receives C(k-2, d-2) in closed form.
 */
inline AdjacencyMatrix project(const HypergraphSample& sample) {
    const auto n = sample.n();
    const int d = sample.d();
    AdjacencyMatrix a(n);
    for (std::size_t t = 0; t < sample.edge_count(); ++t) {
        auto e = sample.edge(t);
        for (int x = 0; x < d; ++x)
            for (int y = x + 1; y < d; ++y) a.add_pair(e[static_cast<std::size_t>(x)], e[static_cast<std::size_t>(y)]);
    }
    const auto s = sample.planted();
    if (s.size() >= static_cast<std::size_t>(d)) {
        const std::uint64_t w = binom(s.size() - 2, static_cast<std::uint64_t>(d - 2));
        for (std::size_t x = 0; x < s.size(); ++x)
            for (std::size_t y = x + 1; y < s.size(); ++y) a.add_pair(s[x], s[y], w);
    }
    return a;
}

/// Oracle projection: materializes every planted d-set. Refuses when C(n, d) > 1e6.
inline AdjacencyMatrix project_bruteforce(const HypergraphSample& sample) {
    const auto n = sample.n();
    const int d = sample.d();
    if (binom_real(n, static_cast<std::uint64_t>(d)) > 1e6)
        throw CapacityError("project_bruteforce: C(n,d) exceeds 1e6");
    AdjacencyMatrix a(n);
    auto add_edge = [&](std::span<const Vertex> e) {
        for (Vertex i : e)
            for (Vertex j : e)
                if (i != j) a.at(i, j) += 1;
    };
    for (std::size_t t = 0; t < sample.edge_count(); ++t) add_edge(sample.edge(t));
    for_each_subset(sample.planted(), d, add_edge);
    return a;
}

/// Off-diagonal entry of the null mean: p * C(n-2, d-2).
inline double null_mean_offdiag(const ModelParams& params) {
    return params.p * static_cast<double>(params.pair_multiplicity());
}

struct PopulationSummary {
    double w_in = 0.0;
    double w_out = 0.0;
    double lambda_star = 0.0;
    double u_star_entry = 0.0;  ///< 1/sqrt(k) on S, 0 elsewhere
    bool degenerate = false;    ///< k < d: every quantity reduces to the null
};

/// Planted-conditional mean weights and the top eigenpair of M* = E_S[A] - E_0[A].
inline PopulationSummary population_summary(const ModelParams& params) {
    PopulationSummary s;
    const double big = static_cast<double>(params.pair_multiplicity());
    s.w_out = params.p * big;
    if (params.planted_degenerate()) {
        s.degenerate = true;
        s.w_in = s.w_out;
        return s;
    }
    const double small = static_cast<double>(binom(params.k - 2, static_cast<std::uint64_t>(params.d - 2)));
    s.w_in = small + params.p * (big - small);
    s.lambda_star = (1.0 - params.p) * static_cast<double>(params.k - 1) * small;
    s.u_star_entry = 1.0 / std::sqrt(static_cast<double>(params.k));
    return s;
}

/// u* = 1_S / sqrt(|S|).
inline std::vector<double> u_star(std::span<const Vertex> planted, std::uint32_t n) {
    std::vector<double> u(n, 0.0);
    if (planted.empty()) return u;
    const double v = 1.0 / std::sqrt(static_cast<double>(planted.size()));
    for (Vertex i : planted) u[i] = v;
    return u;
}

/// M* = (w_in - w_out)(1_S 1_S^T - I_S) as a dense matrix.
inline DenseMatrix population_matrix(const ModelParams& params, std::span<const Vertex> planted) {
    if (planted.size() != params.k) throw ConfigError("population_matrix: |S| must equal k");
    DenseMatrix m(params.n);
    const auto pop = population_summary(params);
    const double w = pop.w_in - pop.w_out;
    if (w == 0.0) return m;
    for (Vertex i : planted)
        for (Vertex j : planted)
            if (i != j) m(i, j) = w;
    return m;
}

/// Two hyperedge families driven by the same per-edge uniforms U_e, with T ⊆ S.
struct CoupledSamples {
    HypergraphSample with_s;  ///< law HPC(n, d, |S|, p) given S
    HypergraphSample with_t;  ///< law HPC(n, d, |T|, p) given T
};

/**
 * Shared-uniform coupling: H_e = 1 inside the planted set, else 1{U_e <= p}, with
 * U_e a counter-based uniform of (seed, rank(e)). Enumerates all d-sets; C(n, d) <= 1e7.
 */
inline CoupledSamples sample_coupled(std::uint32_t n, int d, double p, std::vector<Vertex> s,
                                     std::vector<Vertex> t, std::uint64_t seed) {
    if (binom_real(n, static_cast<std::uint64_t>(d)) > 1e7)
        throw CapacityError("sample_coupled: C(n,d) exceeds 1e7");
    std::sort(s.begin(), s.end());
    std::sort(t.begin(), t.end());
    if (!std::includes(s.begin(), s.end(), t.begin(), t.end()))
        throw ConfigError("sample_coupled: T must be a subset of S");
    const auto s_mask = vertex_mask(s, n);
    const auto t_mask = vertex_mask(t, n);
    std::vector<Vertex> out_s;
    std::vector<Vertex> out_t;
    std::uint64_t rank = 0;
    for_each_dset(n, d, [&](std::span<const Vertex> e) {
        const bool hit = hashed_uniform(seed, rank++) <= p;
        if (!is_subset(e, s_mask) && hit) out_s.insert(out_s.end(), e.begin(), e.end());
        if (!is_subset(e, t_mask) && hit) out_t.insert(out_t.end(), e.begin(), e.end());
    });
    const auto ks = static_cast<std::uint32_t>(s.size());
    const auto kt = static_cast<std::uint32_t>(t.size());
    return {HypergraphSample(ModelParams{n, d, ks, p}, std::move(s), std::move(out_s)),
            HypergraphSample(ModelParams{n, d, kt, p}, std::move(t), std::move(out_t))};
}

/// Relabels every vertex v as perm[v]. perm must be a permutation of [0, n).
inline HypergraphSample relabel(const HypergraphSample& sample, std::span<const Vertex> perm) {
    const auto d = static_cast<std::size_t>(sample.d());
    std::vector<Vertex> planted;
    for (Vertex v : sample.planted()) planted.push_back(perm[v]);
    std::sort(planted.begin(), planted.end());
    std::vector<Vertex> out;
    out.reserve(sample.edge_storage().size());
    std::vector<Vertex> e(d);
    for (std::size_t t = 0; t < sample.edge_count(); ++t) {
        auto src = sample.edge(t);
        for (std::size_t x = 0; x < d; ++x) e[x] = perm[src[x]];
        std::sort(e.begin(), e.end());
        out.insert(out.end(), e.begin(), e.end());
    }
    return HypergraphSample(sample.params(), std::move(planted), std::move(out));
}

}  // namespace hcl
