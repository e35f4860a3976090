#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epr/matrix.hpp"
#include "epr/svd.hpp"

namespace epr {

struct Eigenpair {
    Complex value;
    ComplexVector vector;  // unit 2-norm
};

namespace detail {

inline constexpr double mach_eps = std::numeric_limits<double>::epsilon();

struct GivensRotation {
    double c;   // real cosine
    Complex s;  // complex sine
};

// Rotation with G (f,g)^T = (r,0)^T, G = [[c, s],[-conj(s), c]].
inline GivensRotation make_givens(Complex f, Complex g) {
    if (g == Complex{0.0, 0.0}) return {1.0, Complex{0.0, 0.0}};
    if (f == Complex{0.0, 0.0}) return {0.0, std::conj(g) / std::abs(g)};
    const double af = std::abs(f);
    const double d = std::hypot(af, std::abs(g));
    return {af / d, (f / af) * std::conj(g) / d};
}

// rows k,k+1 <- G * rows
inline void apply_givens_left(ComplexMatrix& m, std::size_t k, const GivensRotation& g,
                              std::size_t col_begin, std::size_t col_end) {
    for (std::size_t j = col_begin; j < col_end; ++j) {
        const Complex a = m(k, j);
        const Complex b = m(k + 1, j);
        m(k, j) = g.c * a + g.s * b;
        m(k + 1, j) = -std::conj(g.s) * a + g.c * b;
    }
}

// cols k,k+1 <- cols * G^dag
inline void apply_givens_right(ComplexMatrix& m, std::size_t k, const GivensRotation& g) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Complex a = m(i, k);
        const Complex b = m(i, k + 1);
        m(i, k) = g.c * a + std::conj(g.s) * b;
        m(i, k + 1) = -g.s * a + g.c * b;
    }
}

// Householder reduction to upper Hessenberg form: a = q h q^dag.
inline void hessenberg(const ComplexMatrix& a, ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = a.rows();
    h = a;
    q = ComplexMatrix::identity(n);
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // Reflector annihilating h(k+2..n-1, k).
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;
        const Complex x0 = h(k + 1, k);
        const Complex phase = (x0 == Complex{0.0, 0.0}) ? Complex{1.0, 0.0} : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;

        std::vector<Complex> v(n, Complex{0.0, 0.0});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(vnorm2);
        for (std::size_t i = k + 1; i < n; ++i) v[i] *= inv;

        // h <- P h P with P = I - 2 v v^dag
        for (std::size_t j = 0; j < n; ++j) {
            Complex dot{0.0, 0.0};
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
            dot *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= dot * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            Complex dot{0.0, 0.0};
            for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            Complex dot{0.0, 0.0};
            for (std::size_t j = k + 1; j < n; ++j) dot += q(i, j) * v[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= dot * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{0.0, 0.0};
    }
}

// Eigenvalue of the trailing 2x2 closest to the corner entry.
inline Complex wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
    const Complex a = h(hi - 1, hi - 1);
    const Complex b = h(hi - 1, hi);
    const Complex c = h(hi, hi - 1);
    const Complex d = h(hi, hi);
    const Complex tr2 = 0.5 * (a + d);
    const Complex disc = std::sqrt(tr2 * tr2 - (a * d - b * c));
    const Complex l1 = tr2 + disc;
    const Complex l2 = tr2 - disc;
    return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

// Shifted QR with deflation; h becomes upper triangular (Schur form), z
// accumulates the similarity. Returns false on stall.
inline bool schur_qr(ComplexMatrix& h, ComplexMatrix& z) {
    const std::size_t n = h.rows();
    if (n <= 1) return true;
    const double hnorm = std::max(frobenius_norm(h), mach_eps);

    std::size_t hi = n - 1;
    int iters_this_eigenvalue = 0;
    const int max_iters_per_eigenvalue = 60;

    while (true) {
        // Zero negligible subdiagonals.
        for (std::size_t k = 1; k <= hi; ++k) {
            const double thresh =
                mach_eps * (std::abs(h(k - 1, k - 1)) + std::abs(h(k, k))) + 1e-300;
            if (std::abs(h(k, k - 1)) <= std::max(thresh, mach_eps * hnorm * 1e-2))
                h(k, k - 1) = Complex{0.0, 0.0};
        }
        while (hi > 0 && h(hi, hi - 1) == Complex{0.0, 0.0}) {
            --hi;
            iters_this_eigenvalue = 0;
        }
        if (hi == 0) return true;

        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != Complex{0.0, 0.0}) --lo;

        if (++iters_this_eigenvalue > max_iters_per_eigenvalue) return false;

        Complex mu = wilkinson_shift(h, hi);
        if (iters_this_eigenvalue % 12 == 0) {
            // Exceptional shift to break symmetry-induced cycles.
            mu = h(hi, hi) + Complex{0.75 * std::abs(h(hi, hi - 1)), 0.0};
        }

        // Rotations from the QR of (active block - mu I), then the similarity
        // update on the full matrix.
        const std::size_t bn = hi - lo + 1;
        ComplexMatrix b(bn, bn);
        for (std::size_t i = 0; i < bn; ++i)
            for (std::size_t j = 0; j < bn; ++j) b(i, j) = h(lo + i, lo + j);
        for (std::size_t i = 0; i < bn; ++i) b(i, i) -= mu;

        std::vector<GivensRotation> rots(bn - 1);
        for (std::size_t k = 0; k + 1 < bn; ++k) {
            rots[k] = make_givens(b(k, k), b(k + 1, k));
            apply_givens_left(b, k, rots[k], k, bn);
        }
        for (std::size_t k = 0; k + 1 < bn; ++k)
            apply_givens_left(h, lo + k, rots[k], 0, h.cols());
        for (std::size_t k = 0; k + 1 < bn; ++k) {
            apply_givens_right(h, lo + k, rots[k]);
            apply_givens_right(z, lo + k, rots[k]);
        }
    }
}

// Characteristic polynomial coefficients c_1..c_n of z^n + c_1 z^{n-1} + ... + c_n
// via the Faddeev-LeVerrier recurrence.
inline std::vector<Complex> characteristic_polynomial(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<Complex> coeffs(n);
    ComplexMatrix m = a;
    coeffs[0] = -m.trace();
    for (std::size_t k = 1; k < n; ++k) {
        ComplexMatrix shifted = m;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) += coeffs[k - 1];
        m = a * shifted;
        coeffs[k] = -m.trace() / static_cast<double>(k + 1);
    }
    return coeffs;
}

// Simultaneous root refinement (Aberth-Ehrlich) for the fallback path.
inline std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs) {
    const std::size_t n = coeffs.size();
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        radius = std::max(radius, std::pow(std::abs(coeffs[k]), 1.0 / static_cast<double>(k + 1)));
    radius = 1.0 + radius;

    std::vector<Complex> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = 6.283185307179586 * (static_cast<double>(i) + 0.25) /
                                 static_cast<double>(n) +
                             0.43;
        z[i] = radius * Complex{std::cos(angle), std::sin(angle)};
    }

    auto eval = [&](Complex x, Complex& p, Complex& dp) {
        p = Complex{1.0, 0.0};
        dp = Complex{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            dp = dp * x + p;
            p = p * x + coeffs[k];
        }
    };

    for (int iter = 0; iter < 400; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex p, dp;
            eval(z[i], p, dp);
            if (p == Complex{0.0, 0.0}) continue;
            Complex w = (dp == Complex{0.0, 0.0}) ? Complex{1e-30, 0.0} : p / dp;
            Complex rep{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && z[i] != z[j]) rep += Complex{1.0, 0.0} / (z[i] - z[j]);
            const Complex denom = Complex{1.0, 0.0} - w * rep;
            const Complex step = (denom == Complex{0.0, 0.0}) ? w : w / denom;
            z[i] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-15) break;
    }
    return z;
}

inline ComplexVector kernel_direction(const ComplexMatrix& a) {
    const Svd f = svd(a);
    return f.v.column(f.v.cols() - 1);
}

} // namespace detail

// Eigenvalues of a general complex matrix, sorted by (re, im).
inline std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
    require_square(a, "eigenvalues");
    require_finite(a, "eigenvalues");
    const std::size_t n = a.rows();
    if (n > max_dimension) throw InvalidInput("eigenvalues: dimension above supported maximum");
    if (n == 0) return {};
    ComplexMatrix h, q;
    detail::hessenberg(a, h, q);
    std::vector<Complex> vals;
    if (detail::schur_qr(h, q)) {
        vals.reserve(n);
        for (std::size_t i = 0; i < n; ++i) vals.push_back(h(i, i));
    } else {
        vals = detail::aberth_roots(detail::characteristic_polynomial(a));
    }
    std::sort(vals.begin(), vals.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return vals;
}

// Eigenpairs via Schur form: triangular back-substitution for the eigenvectors
// of T, then rotation into the original basis. Near-defective inputs give
// nearly parallel vectors with small residuals; the conditioning is the
// caller's concern.
inline std::vector<Eigenpair> eigenpairs(const ComplexMatrix& a) {
    require_square(a, "eigenpairs");
    require_finite(a, "eigenpairs");
    const std::size_t n = a.rows();
    if (n > max_dimension) throw InvalidInput("eigenpairs: dimension above supported maximum");
    std::vector<Eigenpair> out;
    if (n == 0) return out;

    ComplexMatrix t, z;
    detail::hessenberg(a, t, z);
    if (detail::schur_qr(t, z)) {
        const double tnorm = frobenius_norm(t);
        const double small_den = detail::mach_eps * std::max(1.0, tnorm);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Complex> y(n, Complex{0.0, 0.0});
            y[i] = Complex{1.0, 0.0};
            for (std::size_t kk = i; kk-- > 0;) {
                Complex num{0.0, 0.0};
                for (std::size_t j = kk + 1; j <= i; ++j) num += t(kk, j) * y[j];
                Complex den = t(kk, kk) - t(i, i);
                if (std::abs(den) < small_den) den = Complex{small_den, 0.0};
                y[kk] = -num / den;
            }
            ComplexVector v(n);
            for (std::size_t r = 0; r < n; ++r) {
                Complex s{0.0, 0.0};
                for (std::size_t c = 0; c <= i; ++c) s += z(r, c) * y[c];
                v[r] = s;
            }
            out.push_back({t(i, i), normalized(v)});
        }
    } else {
        // QR stalled; fall back to characteristic-polynomial roots plus
        // null-space directions.
        const auto roots = detail::aberth_roots(detail::characteristic_polynomial(a));
        for (const Complex& lambda : roots) {
            ComplexMatrix shifted = a;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
            out.push_back({lambda, normalized(detail::kernel_direction(shifted))});
        }
    }

    std::sort(out.begin(), out.end(), [](const Eigenpair& x, const Eigenpair& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    return out;
}

// max_j ||A v_j - lambda_j v_j||
inline double max_eigenpair_residual(const ComplexMatrix& a, const std::vector<Eigenpair>& pairs) {
    double worst = 0.0;
    for (const auto& p : pairs) worst = std::max(worst, norm(a * p.vector - p.value * p.vector));
    return worst;
}

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
// returned in descending order.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h_in, double herm_tol = 1e-12) {
    require_square(h_in, "hermitian_eigenvalues");
    require_finite(h_in, "hermitian_eigenvalues");
    const std::size_t n = h_in.rows();
    const double scale = frobenius_norm(h_in);
    if (frobenius_norm(h_in - h_in.adjoint()) > herm_tol * std::max(scale, 1e-300) && scale > 0.0)
        throw NotHermitian("hermitian_eigenvalues: matrix is not Hermitian within tolerance");

    // Work on the symmetrized matrix so roundoff asymmetry cannot drift.
    ComplexMatrix h = Complex{0.5, 0.0} * (h_in + h_in.adjoint());

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < detail::jacobi_max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(h(p, q));
                off = std::max(off, mag);
                if (mag <= 1e-16 * std::max(scale, 1e-300)) continue;

                const Complex phase = h(p, q) / mag;  // e^{i phi}
                const double app = h(p, p).real();
                const double aqq = h(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t =
                    (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                const Complex conj_phase = std::conj(phase);

                // Columns p,q <- columns * T with T = diag(1, e^{-i phi}) R.
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex hp = h(i, p);
                    const Complex hq = conj_phase * h(i, q);
                    h(i, p) = cs * hp + sn * hq;
                    h(i, q) = -sn * hp + cs * hq;
                }
                // Rows p,q <- T^dag * rows.
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex hp = h(p, j);
                    const Complex hq = phase * h(q, j);
                    h(p, j) = cs * hp + sn * hq;
                    h(q, j) = -sn * hp + cs * hq;
                }
            }
        }
        converged = off <= 1e-15 * std::max(scale, 1e-300);
    }
    if (!converged) throw NumericalFailure("hermitian_eigenvalues: Jacobi sweeps did not converge");

    std::vector<double> evs(n);
    for (std::size_t i = 0; i < n; ++i) evs[i] = h(i, i).real();
    std::sort(evs.begin(), evs.end(), std::greater<double>());
    return evs;
}

struct PsdReport {
    bool ok;
    std::vector<double> eigenvalues;  // descending
};

// Positive semidefiniteness of a Hermitian matrix: all eigenvalues above
// -tol * max(1, |lambda|_max). Throws NotHermitian when the input is not
// Hermitian within tol relative to its Frobenius norm.
inline PsdReport is_positive_semidefinite(const ComplexMatrix& h, double tol) {
    if (tol <= 0.0) throw InvalidInput("is_positive_semidefinite: tol must be positive");
    const double scale = frobenius_norm(h);
    if (scale > 0.0 && frobenius_norm(h - h.adjoint()) > tol * scale)
        throw NotHermitian("is_positive_semidefinite: matrix is not Hermitian within tolerance");
    auto evs = hermitian_eigenvalues(h, std::max(tol, 1e-12));
    double abs_max = 0.0;
    for (double v : evs) abs_max = std::max(abs_max, std::abs(v));
    const double floor = -tol * std::max(1.0, abs_max);
    bool ok = true;
    for (double v : evs)
        if (v < floor) ok = false;
    return {ok, std::move(evs)};
}

} // namespace epr
