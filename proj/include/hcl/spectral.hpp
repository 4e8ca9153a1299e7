#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hcl/combinatorics.hpp"
#include "hcl/dense.hpp"
#include "hcl/errors.hpp"
#include "hcl/model.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// A symmetric linear operator on R^n with a Gershgorin bound.
template <class Op>
concept SymmetricOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.dim() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);
    { op.max_abs_row_sum() } -> std::convertible_to<double>;
};

/**
 * M = A - mu (J - I) without materializing the centering:
 * (M x)_i = (A x)_i - mu (sum(x) - x_i).
 */
class CenteredOperator {
public:
    CenteredOperator(const AdjacencyMatrix& a, double mu) : a_(&a), mu_(mu) {}

    std::size_t dim() const { return a_->dim(); }
    double mu() const { return mu_; }
    const AdjacencyMatrix& adjacency() const { return *a_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = dim();
        if (x.size() != n || y.size() != n) throw ConfigError("CenteredOperator::apply: dimension mismatch");
        const double total = std::accumulate(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = a_->row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += static_cast<double>(r[j]) * x[j];
            y[i] = s - mu_ * (total - x[i]);
        }
    }

    std::vector<double> operator*(std::span<const double> x) const {
        std::vector<double> y(dim());
        apply(x, y);
        return y;
    }

    double max_abs_row_sum() const {
        const std::size_t n = dim();
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = a_->row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += std::abs(static_cast<double>(r[j]) - mu_);
            best = std::max(best, s);
        }
        return best;
    }

    DenseMatrix materialize() const {
        const std::size_t n = dim();
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) m(i, j) = static_cast<double>((*a_)(i, j)) - mu_;
        return m;
    }

private:
    const AdjacencyMatrix* a_;
    double mu_;
};

/// -op, used to reach the bottom of the spectrum.
template <SymmetricOperator Op>
class NegatedOperator {
public:
    explicit NegatedOperator(const Op& op) : op_(&op) {}
    std::size_t dim() const { return op_->dim(); }
    void apply(std::span<const double> x, std::span<double> y) const {
        op_->apply(x, y);
        for (double& v : y) v = -v;
    }
    double max_abs_row_sum() const { return op_->max_abs_row_sum(); }

private:
    const Op* op_;
};

enum class SolverMethod { lanczos, power };

struct SolverSettings {
    double tol = 1e-10;
    int max_iter = 0;  ///< 0 selects 50 * ceil(log2 n) + 1000
    SolverMethod method = SolverMethod::lanczos;
    int krylov_dim = 48;
};

inline int default_max_iter(std::size_t n) {
    const int lg = n <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
    return 50 * lg + 1000;
}

/// Eigenpair with convergence metadata. `iterations` counts operator applications.
struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Flips v so that its entry of largest magnitude is positive (first such index on ties).
inline void apply_sign_convention(std::span<double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (!v.empty() && v[best] < 0.0)
        for (double& x : v) x = -x;
}

/// Flips v so that <v, ref> >= 0.
inline void align_sign(std::span<double> v, std::span<const double> ref) {
    if (dot(v, ref) < 0.0)
        for (double& x : v) x = -x;
}

/// Full spectrum, eigenvalues descending; column i of `vectors` pairs with values[i].
struct DenseSpectrum {
    std::vector<double> values;
    DenseMatrix vectors;
    int sweeps = 0;

    std::vector<double> vector(std::size_t i) const {
        std::vector<double> v(vectors.dim());
        for (std::size_t r = 0; r < v.size(); ++r) v[r] = vectors(r, i);
        return v;
    }
};

/**
 * Cyclic Jacobi rotations. Terminates once the off-diagonal Frobenius mass is at most
 * 1e-12 ||M||_F. Refuses n > 400.
 */
inline DenseSpectrum dense_eig_oracle(const DenseMatrix& input) {
    const std::size_t n = input.dim();
    if (n > 400) throw CapacityError("dense_eig_oracle: n exceeds 400");
    if (!input.is_symmetric(1e-12 * std::max(1.0, input.frobenius())))
        throw ConfigError("dense_eig_oracle: matrix is not symmetric");
    DenseMatrix a = input;
    DenseMatrix v = DenseMatrix::identity(n);
    const double fro = input.frobenius();
    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    int sweeps = 0;
    for (; sweeps < 100; ++sweeps) {
        const double off = off_mass();
        if (off <= 1e-12 * fro || off == 0.0) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    DenseSpectrum out{std::vector<double>(n), DenseMatrix(n), sweeps};
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(order[i], order[i]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, i) = v(r, order[i]);
    }
    return out;
}

/// ||M|| for a symmetric dense matrix via the oracle spectrum.
inline double dense_spectral_norm(const DenseMatrix& m) {
    if (m.dim() == 0) return 0.0;
    const auto spec = dense_eig_oracle(m);
    return std::max(std::abs(spec.values.front()), std::abs(spec.values.back()));
}

/// max_i ||M_{i:}||_2
inline double two_to_inf_norm(const DenseMatrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) best = std::max(best, norm2(m.row(i)));
    return best;
}

namespace detail {

template <SymmetricOperator Op>
double residual_norm(const Op& op, std::span<const double> x, double& rayleigh, std::vector<double>& work) {
    op.apply(x, work);
    rayleigh = dot(x, work);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = work[i] - rayleigh * x[i];
        s += r * r;
    }
    return std::sqrt(s);
}

template <SymmetricOperator Op>
EigenPair power_leading(const Op& op, std::vector<double> x, double shift, const SolverSettings& s, int max_iter) {
    const std::size_t n = op.dim();
    std::vector<double> y(n);
    EigenPair out;
    while (true) {
        double theta = 0.0;
        const double res = residual_norm(op, x, theta, y);
        ++out.iterations;
        out.value = theta;
        out.residual = res;
        if (res <= s.tol * (std::abs(theta) + shift)) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter) break;
        for (std::size_t i = 0; i < n; ++i) y[i] += shift * x[i];
        const double nrm = norm2(y);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / nrm;
    }
    out.vector = std::move(x);
    return out;
}

template <SymmetricOperator Op>
EigenPair lanczos_leading(const Op& op, std::vector<double> x, double shift, const SolverSettings& s, int max_iter) {
    const std::size_t n = op.dim();
    const std::size_t m_max = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(2, s.krylov_dim)));
    std::vector<std::vector<double>> basis;
    std::vector<double> w(n);
    std::vector<double> y(n);
    EigenPair out;
    while (true) {
        basis.assign(1, x);
        std::vector<double> alpha;
        std::vector<double> beta;
        const double breakdown = 1e-14 * std::max(shift, 1e-300);
        for (std::size_t j = 0; j < m_max; ++j) {
            op.apply(basis[j], w);
            ++out.iterations;
            alpha.push_back(dot(w, basis[j]));
            // Full reorthogonalization, two passes.
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) {
                    const double c = dot(w, b);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
                }
            const double b = norm2(w);
            if (j + 1 == m_max || b <= breakdown || out.iterations >= max_iter) break;
            beta.push_back(b);
            for (double& v : w) v /= b;
            basis.push_back(w);
        }
        const std::size_t m = alpha.size();
        DenseMatrix t(m);
        for (std::size_t i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        const auto ritz = dense_eig_oracle(t);
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double c = ritz.vectors(i, 0);
            for (std::size_t r = 0; r < n; ++r) x[r] += c * basis[i][r];
        }
        const double nrm = norm2(x);
        for (double& v : x) v /= nrm;
        double theta = 0.0;
        const double res = residual_norm(op, x, theta, y);
        ++out.iterations;
        out.value = theta;
        out.residual = res;
        if (res <= s.tol * (std::abs(theta) + shift)) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter) break;
    }
    out.vector = std::move(x);
    return out;
}

}  // namespace detail

/**
 * Eigenpair of the largest algebraic eigenvalue. Converged when
 * ||op(v) - value v|| <= tol (|value| + c), c the Gershgorin bound of op.
 * Non-convergence returns converged = false with the last iterate.
 */
template <SymmetricOperator Op>
EigenPair leading_algebraic_eigenpair(const Op& op, const SolverSettings& settings, std::uint64_t seed) {
    if (!(settings.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    const std::size_t n = op.dim();
    if (n == 0) throw ConfigError("empty operator");
    const int max_iter = settings.max_iter > 0 ? settings.max_iter : default_max_iter(n);
    const double shift = op.max_abs_row_sum();
    Rng rng(mix64({seed, 0x4549474eULL}));
    auto x = rng.unit_vector(n);
    EigenPair out = settings.method == SolverMethod::power ? detail::power_leading(op, std::move(x), shift, settings, max_iter)
                                                           : detail::lanczos_leading(op, std::move(x), shift, settings, max_iter);
    apply_sign_convention(out.vector);
    return out;
}

struct SpectralNormResult {
    double norm = 0.0;
    EigenPair top;
    EigenPair bottom;  ///< eigenpair of -op
};

/// max(lambda_max, -lambda_min) from two runs: on op and on -op.
template <SymmetricOperator Op>
SpectralNormResult spectral_norm_detail(const Op& op, const SolverSettings& settings, std::uint64_t seed) {
    SpectralNormResult r;
    r.top = leading_algebraic_eigenpair(op, settings, mix64({seed, 1}));
    r.bottom = leading_algebraic_eigenpair(NegatedOperator<Op>(op), settings, mix64({seed, 2}));
    if (!r.top.converged || !r.bottom.converged)
        throw SolverError("spectral_norm: eigensolver did not converge (residual " +
                          std::to_string(std::max(r.top.residual, r.bottom.residual)) + ")");
    r.norm = std::max(r.top.value, r.bottom.value);
    return r;
}

template <SymmetricOperator Op>
double spectral_norm(const Op& op, const SolverSettings& settings, std::uint64_t seed) {
    return spectral_norm_detail(op, settings, seed).norm;
}

/// Dense centered matrix M = A - E_0[A] of a sample.
inline DenseMatrix centered_dense(const AdjacencyMatrix& a, double mu) { return CenteredOperator(a, mu).materialize(); }

inline DenseMatrix centered_dense(const HypergraphSample& sample) {
    const auto a = project(sample);
    return centered_dense(a, null_mean_offdiag(sample.params()));
}

/// Co-membership matrix action: adds w to every ordered pair i != j inside e.
inline void add_comembership(DenseMatrix& m, std::span<const Vertex> e, double w) {
    for (Vertex i : e)
        for (Vertex j : e)
            if (i != j) m(i, j) += w;
}

/// (B_e v) for the co-membership matrix of e.
inline std::vector<double> comembership_apply(std::span<const Vertex> e, std::span<const double> v) {
    std::vector<double> out(v.size(), 0.0);
    double s = 0.0;
    for (Vertex j : e) s += v[j];
    for (Vertex i : e) out[i] = s - v[i];
    return out;
}

struct LeaveOneOut {
    DenseMatrix m_minus;  ///< M^(-m): every hyperedge through m and its centering removed
    DenseMatrix b;        ///< B^(m) = M - M^(-m)
};

/**
 * M^(-m) from an independent projection of the hyperedges avoiding m, centered by
 * p C(n-3, d-2) on pairs avoiding m; row and column m are zero. B^(m) = M - M^(-m).
 */
inline LeaveOneOut leave_one_out(const HypergraphSample& sample, Vertex m) {
    const auto n = sample.n();
    const int d = sample.d();
    if (m >= n) throw ConfigError("leave_one_out: vertex out of range");
    const auto& params = sample.params();
    AdjacencyMatrix a_minus(n);
    for (std::size_t t = 0; t < sample.edge_count(); ++t) {
        auto e = sample.edge(t);
        if (std::find(e.begin(), e.end(), m) != e.end()) continue;
        for (int x = 0; x < d; ++x)
            for (int y = x + 1; y < d; ++y) a_minus.add_pair(e[static_cast<std::size_t>(x)], e[static_cast<std::size_t>(y)]);
    }
    std::vector<Vertex> rest;
    for (Vertex v : sample.planted())
        if (v != m) rest.push_back(v);
    if (rest.size() >= static_cast<std::size_t>(d)) {
        const std::uint64_t w = binom(rest.size() - 2, static_cast<std::uint64_t>(d - 2));
        for (std::size_t x = 0; x < rest.size(); ++x)
            for (std::size_t y = x + 1; y < rest.size(); ++y) a_minus.add_pair(rest[x], rest[y], w);
    }
    const double mu_minus = n >= 3 ? params.p * static_cast<double>(binom(n - 3, static_cast<std::uint64_t>(d - 2))) : 0.0;
    LeaveOneOut out{DenseMatrix(n), DenseMatrix()};
    for (std::size_t i = 0; i < n; ++i) {
        if (i == m) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && j != m) out.m_minus(i, j) = static_cast<double>(a_minus(i, j)) - mu_minus;
    }
    out.b = centered_dense(sample) - out.m_minus;
    return out;
}

namespace detail {

/// Calls f(e, planted, present) for every d-set e containing m.
template <class F>
void for_each_incident_dset(const HypergraphSample& sample, Vertex m, F&& f) {
    const auto n = sample.n();
    const int d = sample.d();
    std::unordered_set<std::uint64_t> present;
    for (std::size_t t = 0; t < sample.edge_count(); ++t) {
        auto e = sample.edge(t);
        if (std::find(e.begin(), e.end(), m) != e.end()) present.insert(rank_dset(e, n, d));
    }
    std::vector<Vertex> others;
    for (Vertex v = 0; v < n; ++v)
        if (v != m) others.push_back(v);
    std::vector<Vertex> e(static_cast<std::size_t>(d));
    for_each_subset(others, d - 1, [&](std::span<const Vertex> rest) {
        std::size_t pos = 0;
        bool placed = false;
        for (Vertex v : rest) {
            if (!placed && m < v) {
                e[pos++] = m;
                placed = true;
            }
            e[pos++] = v;
        }
        if (!placed) e[pos] = m;
        const bool planted = is_subset(e, sample.planted_mask());
        const bool on = planted || present.count(rank_dset(e, n, d)) != 0;
        f(std::span<const Vertex>(e), planted, on);
    });
}

}  // namespace detail

/// B^(m) assembled as the hyperedge sum over e ∋ m of (H_e - p) B_e.
inline DenseMatrix loo_perturbation_hyperedge_sum(const HypergraphSample& sample, Vertex m) {
    if (m >= sample.n()) throw ConfigError("vertex out of range");
    const double p = sample.params().p;
    DenseMatrix b(sample.n());
    detail::for_each_incident_dset(sample, m, [&](std::span<const Vertex> e, bool, bool on) {
        add_comembership(b, e, (on ? 1.0 : 0.0) - p);
    });
    return b;
}

/// P^(m) = sum over planted e ∋ m of (1 - p) B_e.
inline DenseMatrix loo_planted_part(const HypergraphSample& sample, Vertex m) {
    if (m >= sample.n()) throw ConfigError("vertex out of range");
    const double p = sample.params().p;
    DenseMatrix out(sample.n());
    if (!sample.in_planted(m)) return out;
    std::vector<Vertex> rest;
    for (Vertex v : sample.planted())
        if (v != m) rest.push_back(v);
    std::vector<Vertex> e;
    for_each_subset(rest, sample.d() - 1, [&](std::span<const Vertex> r) {
        e.assign(r.begin(), r.end());
        e.push_back(m);
        add_comembership(out, e, 1.0 - p);
    });
    return out;
}

/// W^(m) = sum over non-planted e ∋ m of (H_e - p) B_e.
inline DenseMatrix loo_noise_part(const HypergraphSample& sample, Vertex m) {
    if (m >= sample.n()) throw ConfigError("vertex out of range");
    const double p = sample.params().p;
    DenseMatrix w(sample.n());
    detail::for_each_incident_dset(sample, m, [&](std::span<const Vertex> e, bool planted, bool on) {
        if (!planted) add_comembership(w, e, (on ? 1.0 : 0.0) - p);
    });
    return w;
}

}  // namespace hcl
