#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace hcl {

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Derives a 64-bit seed from a sequence of words. Each word is offset by the golden-ratio
 * increment, finalized, xored into the running state, and the state finalized again.
 * mix64({master, grid_index, rep}) is the per-replicate seed of the experiment harness.
 */
constexpr std::uint64_t mix64(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words) h = splitmix64_finalize(h ^ splitmix64_finalize(w + 0x9e3779b97f4a7c15ULL));
    return h;
}

/// Counter-based uniform in [0, 1): a pure function of (seed, counter).
inline double hashed_uniform(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix64({seed, counter}) >> 11) * 0x1.0p-53;
}

/**
 * Seeded generator. Wraps std::mt19937_64, whose output sequence is fixed by the standard,
 * and maps raw words to distributions itself so results do not depend on the standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Sorted uniform k-subset of [0, n) by partial Fisher-Yates.
    std::vector<std::uint32_t> subset(std::uint32_t n, std::uint32_t k) {
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
        for (std::uint32_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::uint32_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    /// Random unit vector with independent uniform(-1, 1) entries before normalization.
    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v(n);
        double s = 0.0;
        do {
            s = 0.0;
            for (auto& x : v) {
                x = uniform(-1.0, 1.0);
                s += x * x;
            }
        } while (s == 0.0);
        const double inv = 1.0 / std::sqrt(s);
        for (auto& x : v) x *= inv;
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hcl
