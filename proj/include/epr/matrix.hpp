#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "epr/errors.hpp"

namespace epr {

using Complex = std::complex<double>;

// Everything in this library works on small dense matrices; the analysis is
// only meaningful on the n-dimensional generalized eigenspace of a degeneracy,
// so dimensions stay tiny.
inline constexpr std::size_t max_dimension = 16;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

class ComplexVector {
public:
    ComplexVector() = default;

    explicit ComplexVector(std::size_t dim) : entries_(dim, Complex{0.0, 0.0}) {}

    ComplexVector(std::initializer_list<Complex> init) : entries_(init) {}

    explicit ComplexVector(std::vector<Complex> entries) : entries_(std::move(entries)) {}

    std::size_t dim() const { return entries_.size(); }

    Complex& operator[](std::size_t i) { return entries_[i]; }
    const Complex& operator[](std::size_t i) const { return entries_[i]; }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    const std::vector<Complex>& entries() const { return entries_; }

private:
    std::vector<Complex> entries_;
};

// Row-major dense complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_)
            throw InvalidInput("ComplexMatrix: entry count does not match rows*cols");
    }

    // Row-wise construction from nested braces.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        entries_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw InvalidInput("ComplexMatrix: ragged initializer rows");
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    const std::vector<Complex>& entries() const { return entries_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    ComplexVector column(std::size_t j) const {
        ComplexVector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

// ---- validation -------------------------------------------------------------

inline bool all_finite(const ComplexVector& v) {
    for (const auto& z : v)
        if (!is_finite(z)) return false;
    return true;
}

inline bool all_finite(const ComplexMatrix& a) {
    for (const auto& z : a.entries())
        if (!is_finite(z)) return false;
    return true;
}

inline void require_finite(const ComplexVector& v, const std::string& what) {
    if (!all_finite(v)) throw InvalidInput(what + ": non-finite vector entry");
}

inline void require_finite(const ComplexMatrix& a, const std::string& what) {
    if (!all_finite(a)) throw InvalidInput(what + ": non-finite matrix entry");
}

inline void require_square(const ComplexMatrix& a, const std::string& what) {
    if (!a.is_square()) throw DimensionMismatch(what + ": matrix is not square");
}

// ---- vector algebra ---------------------------------------------------------

// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const ComplexVector& a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner: dimension mismatch");
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm(const ComplexVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline ComplexVector operator+(const ComplexVector& a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("vector +: dimension mismatch");
    ComplexVector r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline ComplexVector operator-(const ComplexVector& a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("vector -: dimension mismatch");
    ComplexVector r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline ComplexVector operator*(Complex s, const ComplexVector& v) {
    ComplexVector r(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) r[i] = s * v[i];
    return r;
}

inline ComplexVector normalized(const ComplexVector& v) {
    double n = norm(v);
    if (n == 0.0) throw InvalidInput("normalized: zero vector");
    return Complex{1.0 / n, 0.0} * v;
}

// ---- matrix algebra ---------------------------------------------------------

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix +: shape mismatch");
    ComplexMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix -: shape mismatch");
    ComplexMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
    ComplexMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
    return r;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix *: shape mismatch");
    ComplexMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& v) {
    if (a.cols() != v.dim()) throw DimensionMismatch("matrix * vector: shape mismatch");
    ComplexVector r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s{0.0, 0.0};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline ComplexMatrix matrix_power(const ComplexMatrix& a, unsigned k) {
    require_square(a, "matrix_power");
    ComplexMatrix r = ComplexMatrix::identity(a.rows());
    for (unsigned i = 0; i < k; ++i) r = r * a;
    return r;
}

// sqrt(tr(A^dag A)); also the root of the sum of squared singular values.
inline double frobenius_norm(const ComplexMatrix& a) {
    require_finite(a, "frobenius_norm");
    double s = 0.0;
    for (const auto& z : a.entries()) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace epr
