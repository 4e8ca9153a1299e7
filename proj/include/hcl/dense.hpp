#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hcl/errors.hpp"

namespace hcl {

/// Row-major dense real square matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }
    std::span<const double> data() const { return a_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        if (x.size() != n_ || y.size() != n_) throw ConfigError("DenseMatrix::apply: dimension mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            const double* r = a_.data() + i * n_;
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) s += r[j] * x[j];
            y[i] = s;
        }
    }

    std::vector<double> operator*(std::span<const double> x) const {
        std::vector<double> y(n_);
        apply(x, y);
        return y;
    }

    /// Gershgorin radius: max_i sum_j |a_ij|.
    double max_abs_row_sum() const {
        double best = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (double v : row(i)) s += std::abs(v);
            best = std::max(best, s);
        }
        return best;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    bool is_symmetric(double tol = 0.0) const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    DenseMatrix& operator*=(double c) {
        for (double& v : a_) v *= c;
        return *this;
    }
    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(double c, DenseMatrix a) { return a *= c; }

    /// max_ij |a_ij - b_ij|
    double max_abs_diff(const DenseMatrix& o) const {
        check_same(o);
        double m = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    void check_same(const DenseMatrix& o) const {
        if (o.n_ != n_) throw ConfigError("DenseMatrix: dimension mismatch");
    }

    std::size_t n_ = 0;
    std::vector<double> a_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace hcl
