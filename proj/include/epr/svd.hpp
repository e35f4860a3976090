#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "epr/matrix.hpp"

namespace epr {

// Singular value decomposition by one-sided Jacobi rotations. For each column
// pair (p,q) a unitary 2x2 rotation orthogonalizes the columns; at convergence
// the working columns are U_j * sigma_j and the accumulated rotations form V,
// so A = U diag(sigma) V^dag (thin factors, k = min(rows, cols)).
//
// One-sided Jacobi is slow for large matrices but at n <= 16 it is simple and
// computes small singular values to high relative accuracy, which matters for
// rank decisions near a defective matrix.

struct Svd {
    ComplexMatrix u;            // rows x k
    std::vector<double> sigma;  // descending, size k
    ComplexMatrix v;            // cols x k
};

namespace detail {

inline constexpr double jacobi_off_tol = 1e-14;
inline constexpr int jacobi_max_sweeps = 100;

// Orthogonalize columns p,q of w in place, accumulating the rotation into v.
inline void jacobi_orthogonalize(ComplexMatrix& w, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const std::size_t m = w.rows();
    double app = 0.0, aqq = 0.0;
    Complex apq{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
        app += std::norm(w(i, p));
        aqq += std::norm(w(i, q));
        apq += std::conj(w(i, p)) * w(i, q);
    }
    const double mag = std::abs(apq);
    if (mag == 0.0 || app == 0.0 || aqq == 0.0) return;

    // Phase that makes the column overlap real, then a real Jacobi rotation.
    const Complex phase = apq / mag;  // e^{i phi}
    const double tau = (aqq - app) / (2.0 * mag);
    const double t = (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::hypot(1.0, tau));
    const double cs = 1.0 / std::sqrt(1.0 + t * t);
    const double sn = t * cs;

    const Complex conj_phase = std::conj(phase);
    for (std::size_t i = 0; i < m; ++i) {
        const Complex wp = w(i, p);
        const Complex wq = conj_phase * w(i, q);
        w(i, p) = cs * wp + sn * wq;
        w(i, q) = -sn * wp + cs * wq;
    }
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const Complex vp = v(i, p);
        const Complex vq = conj_phase * v(i, q);
        v(i, p) = cs * vp + sn * vq;
        v(i, q) = -sn * vp + cs * vq;
    }
}

// Tall (rows >= cols) one-sided Jacobi.
inline Svd svd_tall(const ComplexMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    ComplexMatrix w = a;
    ComplexMatrix v = ComplexMatrix::identity(n);

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < jacobi_max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                Complex apq{0.0, 0.0};
                for (std::size_t i = 0; i < m; ++i) {
                    app += std::norm(w(i, p));
                    aqq += std::norm(w(i, q));
                    apq += std::conj(w(i, p)) * w(i, q);
                }
                if (app == 0.0 || aqq == 0.0) continue;
                const double rel = std::abs(apq) / std::sqrt(app * aqq);
                off = std::max(off, rel);
                if (rel > jacobi_off_tol) jacobi_orthogonalize(w, v, p, q);
            }
        }
        converged = off <= jacobi_off_tol;
    }
    if (!converged) throw NumericalFailure("svd: Jacobi sweeps did not converge");

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, j));
        sigma[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    Svd out;
    out.sigma.resize(n);
    out.u = ComplexMatrix(m, n);
    out.v = ComplexMatrix(n, n);
    const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
    const double tiny = sigma_max * 1e-15;
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t src = order[jj];
        out.sigma[jj] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, jj) = v(i, src);
        if (sigma[src] > tiny && sigma[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, jj) = w(i, src) / sigma[src];
        }
    }
    // Fill any null columns of U with an orthonormal completion (Gram-Schmidt
    // against the already-placed columns, seeded from the standard basis).
    for (std::size_t jj = 0; jj < n; ++jj) {
        if (out.sigma[jj] > tiny && out.sigma[jj] > 0.0) continue;
        for (std::size_t seed = 0; seed < m; ++seed) {
            ComplexVector cand(m);
            cand[seed] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < n; ++c) {
                    if (c == jj) continue;
                    Complex ov{0.0, 0.0};
                    for (std::size_t i = 0; i < m; ++i) ov += std::conj(out.u(i, c)) * cand[i];
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= ov * out.u(i, c);
                }
            }
            const double nc = norm(cand);
            if (nc > 0.5) {
                for (std::size_t i = 0; i < m; ++i) out.u(i, jj) = cand[i] / nc;
                break;
            }
        }
    }
    return out;
}

} // namespace detail

inline Svd svd(const ComplexMatrix& a) {
    require_finite(a, "svd");
    if (a.rows() == 0 || a.cols() == 0) throw InvalidInput("svd: empty matrix");
    if (a.rows() >= a.cols()) return detail::svd_tall(a);
    Svd t = detail::svd_tall(a.adjoint());
    return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

// Descending, size min(rows, cols).
inline std::vector<double> singular_values(const ComplexMatrix& a) { return svd(a).sigma; }

// Largest singular value.
inline double spectral_norm(const ComplexMatrix& a) {
    auto s = singular_values(a);
    return s.empty() ? 0.0 : s.front();
}

inline constexpr double default_rank_tol = 1e-10;

// Count of singular values above tol * sigma_max; a matrix whose largest
// singular value is below 1e-14 counts as zero.
inline int numerical_rank(const ComplexMatrix& a, double tol = default_rank_tol) {
    if (tol <= 0.0) throw InvalidInput("numerical_rank: tol must be positive");
    const auto s = singular_values(a);
    if (s.empty() || s.front() <= 1e-14) return 0;
    const double cut = tol * s.front();
    int r = 0;
    for (double v : s)
        if (v > cut) ++r;
    return r;
}

struct LeastSquaresSolution {
    ComplexVector x;
    double residual;  // ||A x - b||_2
};

// Minimum-2-norm least-squares solution via SVD truncation: singular values
// below rank_tol * sigma_max are treated as zero, so the solution carries no
// component along the numerical null space.
inline LeastSquaresSolution min_norm_solve(const ComplexMatrix& a, const ComplexVector& b,
                                           double rank_tol = default_rank_tol) {
    require_finite(a, "min_norm_solve");
    require_finite(b, "min_norm_solve");
    if (a.rows() != b.dim()) throw DimensionMismatch("min_norm_solve: rows(A) != dim(b)");

    const Svd f = svd(a);
    const double cut = f.sigma.empty() ? 0.0 : std::max(f.sigma.front() * rank_tol, 1e-300);
    ComplexVector x(a.cols());
    for (std::size_t k = 0; k < f.sigma.size(); ++k) {
        if (f.sigma[k] <= cut) break;
        Complex coeff{0.0, 0.0};
        for (std::size_t i = 0; i < a.rows(); ++i) coeff += std::conj(f.u(i, k)) * b[i];
        coeff /= f.sigma[k];
        for (std::size_t i = 0; i < a.cols(); ++i) x[i] += coeff * f.v(i, k);
    }
    return {x, norm(a * x - b)};
}

// sigma_max / sigma_min; infinity when singular to machine precision.
inline double condition_number(const ComplexMatrix& a) {
    const auto s = singular_values(a);
    if (s.empty() || s.back() == 0.0) return std::numeric_limits<double>::infinity();
    return s.front() / s.back();
}

} // namespace epr
