#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hcl/errors.hpp"

namespace hcl {

/// Vertex ids are 0-based inside the library; file formats and the CLI use 1-based ids.
using Vertex = std::uint32_t;

/// Largest hyperedge size the combinatorial routines accept.
inline constexpr int kMaxEdgeSize = 8;

/**
 * Exact binomial coefficient C(n, k), with C(n, k) = 0 for k > n.
 * Throws ConfigError when the value does not fit in 64 bits.
 */
inline std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        // r * (n - i) is divisible by (i + 1) because r = C(n, i).
        r = r * (n - i) / (i + 1);
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw ConfigError("binomial coefficient C(" + std::to_string(n) + "," +
                              std::to_string(k) + ") overflows 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

/// C(n, k) in floating point; for size and capacity estimates only, never for indexing.
inline double binom_real(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::uint64_t i = 0; i < k; ++i) r = r * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    return static_cast<double>(r);
}

/// Precomputed C(c, j) for 0 <= c <= n_max, 0 <= j <= k_max. Used on the sampling hot path.
class BinomialTable {
public:
    BinomialTable(std::uint32_t n_max, int k_max)
        : n_max_(n_max), k_max_(k_max), table_((n_max + 1) * static_cast<std::size_t>(k_max + 1)) {
        for (std::uint32_t c = 0; c <= n_max; ++c)
            for (int j = 0; j <= k_max; ++j) table_[index(c, j)] = binom(c, static_cast<std::uint64_t>(j));
    }

    std::uint64_t operator()(std::uint32_t c, int j) const { return table_[index(c, j)]; }
    std::uint32_t n_max() const { return n_max_; }
    int k_max() const { return k_max_; }

private:
    std::size_t index(std::uint32_t c, int j) const {
        return static_cast<std::size_t>(c) * static_cast<std::size_t>(k_max_ + 1) + static_cast<std::size_t>(j);
    }

    std::uint32_t n_max_;
    int k_max_;
    std::vector<std::uint64_t> table_;
};

/// True iff `e` is a strictly increasing sequence of exactly d ids in [0, n).
inline bool is_valid_dset(std::span<const Vertex> e, std::uint32_t n, int d) {
    if (static_cast<int>(e.size()) != d) return false;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] >= n) return false;
        if (i > 0 && e[i] <= e[i - 1]) return false;
    }
    return true;
}

/// A d-subset of the vertex set, stored as strictly increasing 0-based ids.
class DSet {
public:
    DSet() = default;

    /// Validates and wraps; throws ConfigError if the sequence is not a valid d-set of [n].
    DSet(std::vector<Vertex> vertices, std::uint32_t n) : v_(std::move(vertices)) {
        if (v_.empty() || static_cast<int>(v_.size()) > kMaxEdgeSize ||
            !is_valid_dset(v_, n, static_cast<int>(v_.size())))
            throw ConfigError("invalid d-set");
    }

    std::span<const Vertex> vertices() const { return v_; }
    int size() const { return static_cast<int>(v_.size()); }
    Vertex operator[](std::size_t i) const { return v_[i]; }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    friend bool operator==(const DSet&, const DSet&) = default;

private:
    std::vector<Vertex> v_;
};

/// Colexicographic rank: sum over positions j (1-based) of C(e_j, j).
inline std::uint64_t rank_dset(std::span<const Vertex> e, std::uint32_t n, int d) {
    if (!is_valid_dset(e, n, d)) throw ConfigError("rank_dset: invalid d-set");
    std::uint64_t r = 0;
    for (int j = 0; j < d; ++j) r += binom(e[static_cast<std::size_t>(j)], static_cast<std::uint64_t>(j + 1));
    return r;
}

inline std::uint64_t rank_dset(const DSet& e, std::uint32_t n, int d) { return rank_dset(e.vertices(), n, d); }

/**
 * Writes the rank-th d-set (colex order) into `out` using a precomputed table.
 * The caller guarantees rank < C(table.n_max(), d) and out.size() == d.
 */
inline void unrank_dset_into(std::uint64_t rank, int d, const BinomialTable& table, std::span<Vertex> out) {
    std::uint32_t hi = table.n_max();
    for (int j = d; j >= 1; --j) {
        // Largest c < hi with C(c, j) <= rank.
        std::uint32_t lo = static_cast<std::uint32_t>(j - 1);
        std::uint32_t top = hi - 1;
        while (lo < top) {
            std::uint32_t mid = lo + (top - lo + 1) / 2;
            if (table(mid, j) <= rank)
                lo = mid;
            else
                top = mid - 1;
        }
        out[static_cast<std::size_t>(j - 1)] = lo;
        rank -= table(lo, j);
        hi = lo;
    }
}

inline DSet unrank_dset(std::uint64_t rank, std::uint32_t n, int d) {
    if (d < 1 || d > kMaxEdgeSize || static_cast<std::uint32_t>(d) > n)
        throw ConfigError("unrank_dset: unsupported (n, d)");
    if (rank >= binom(n, static_cast<std::uint64_t>(d))) throw ConfigError("unrank_dset: rank out of range");
    BinomialTable table(n, d);
    std::vector<Vertex> v(static_cast<std::size_t>(d));
    unrank_dset_into(rank, d, table, v);
    return DSet(std::move(v), n);
}

/// Advances `c` (strictly increasing ids in [0, n)) to the next combination in colex order.
inline bool next_combination_colex(std::span<Vertex> c, std::uint32_t n) {
    const std::size_t d = c.size();
    for (std::size_t j = 0; j < d; ++j) {
        const Vertex limit = (j + 1 < d) ? c[j + 1] : n;
        if (c[j] + 1 < limit) {
            ++c[j];
            for (std::size_t i = 0; i < j; ++i) c[i] = static_cast<Vertex>(i);
            return true;
        }
    }
    return false;
}

/// Calls f(span<const Vertex>) for every d-subset of [0, n) in colex order (rank 0, 1, ...).
template <class F>
void for_each_dset(std::uint32_t n, int d, F&& f) {
    if (d < 1 || static_cast<std::uint32_t>(d) > n) return;
    std::vector<Vertex> c(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<Vertex>(i);
    do {
        f(std::span<const Vertex>(c));
    } while (next_combination_colex(c, n));
}

/// Calls f(span<const Vertex>) for every d-subset of the sorted set `base`.
template <class F>
void for_each_subset(std::span<const Vertex> base, int d, F&& f) {
    const auto m = static_cast<std::uint32_t>(base.size());
    if (d < 1 || static_cast<std::uint32_t>(d) > m) return;
    std::vector<Vertex> idx(static_cast<std::size_t>(d));
    std::vector<Vertex> e(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Vertex>(i);
    do {
        for (std::size_t i = 0; i < idx.size(); ++i) e[i] = base[idx[i]];
        f(std::span<const Vertex>(e));
    } while (next_combination_colex(idx, m));
}

/// Membership mask of a vertex set over [0, n).
inline std::vector<char> vertex_mask(std::span<const Vertex> set, std::uint32_t n) {
    std::vector<char> mask(n, 0);
    for (Vertex v : set) {
        if (v >= n) throw ConfigError("vertex id out of range");
        mask[v] = 1;
    }
    return mask;
}

inline int intersection_size(std::span<const Vertex> e, const std::vector<char>& mask) {
    int r = 0;
    for (Vertex v : e) r += mask[v] ? 1 : 0;
    return r;
}

/// Ordered pairs (i, j), i != j, of T inside e: r(r-1) with r = |e ∩ T|.
inline std::uint64_t c_e(std::span<const Vertex> e, const std::vector<char>& t_mask) {
    const auto r = static_cast<std::uint64_t>(intersection_size(e, t_mask));
    return r * (r == 0 ? 0 : r - 1);
}

inline std::uint64_t c_e(std::span<const Vertex> e, std::span<const Vertex> t, std::uint32_t n) {
    return c_e(e, vertex_mask(t, n));
}

inline bool is_subset(std::span<const Vertex> e, const std::vector<char>& mask) {
    return std::all_of(e.begin(), e.end(), [&](Vertex v) { return mask[v] != 0; });
}

/**
 * Sum of c_e(T) over all d-sets e of [n] not contained in T, |T| = k0:
 * k0(k0-1)(C(n-2,d-2) - C(k0-2,d-2)).
 */
inline std::uint64_t sum_ce_out_closed_form(std::uint64_t n, std::uint64_t k0, std::uint64_t d) {
    if (d < 2 || k0 < d || n < k0) throw ConfigError("sum_ce_out_closed_form requires 2 <= d <= k0 <= n");
    return k0 * (k0 - 1) * (binom(n - 2, d - 2) - binom(k0 - 2, d - 2));
}

}  // namespace hcl
