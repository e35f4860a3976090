#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "epr/matrix.hpp"

namespace epr {

// LU factorization with partial pivoting for the direct solves (resolvents,
// similarity transforms). Rank decisions go through the SVD, not through here.
class LuFactorization {
public:
    explicit LuFactorization(const ComplexMatrix& a) : lu_(a), perm_(a.rows()) {
        require_square(a, "lu");
        require_finite(a, "lu");
        const std::size_t n = a.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double m = std::abs(lu_(i, k));
                if (m > best) {
                    best = m;
                    piv = i;
                }
            }
            if (best == 0.0) throw NumericalFailure("lu: matrix is singular");
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu_(i, k) /= lu_(k, k);
                const Complex f = lu_(i, k);
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    ComplexVector solve(const ComplexVector& b) const {
        const std::size_t n = lu_.rows();
        if (b.dim() != n) throw DimensionMismatch("lu solve: dimension mismatch");
        ComplexVector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
            x[ii] /= lu_(ii, ii);
        }
        return x;
    }

    ComplexMatrix solve(const ComplexMatrix& b) const {
        const std::size_t n = lu_.rows();
        if (b.rows() != n) throw DimensionMismatch("lu solve: dimension mismatch");
        ComplexMatrix x(n, b.cols());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ComplexVector col = solve(b.column(j));
            for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
        }
        return x;
    }

private:
    ComplexMatrix lu_;
    std::vector<std::size_t> perm_;
};

inline ComplexVector lu_solve(const ComplexMatrix& a, const ComplexVector& b) {
    return LuFactorization(a).solve(b);
}

inline ComplexMatrix inverse(const ComplexMatrix& a) {
    return LuFactorization(a).solve(ComplexMatrix::identity(a.rows()));
}

} // namespace epr
