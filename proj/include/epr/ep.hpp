#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epr/eigen.hpp"
#include "epr/lu.hpp"
#include "epr/matrix.hpp"
#include "epr/svd.hpp"

// Analysis of a Hamiltonian at an exceptional point of order n.
//
// With N = H0 - E_ep, a genuine order-n degeneracy means N is nilpotent of
// index n with a one-dimensional kernel. The resolvent of H0 expands in powers
// of 1/(E - E_ep) with matrix coefficients G_k = N^{k-1}; the highest
// coefficient G_n is rank one, and its norm (spectral and Frobenius coincide
// on rank-one matrices) is the spectral response strength xi. The Jordan chain
// j_1..j_n, normalized so that <j_1|j_1> = 1 and <j_n|j_l> = 0 for l < n,
// yields the eigenstate response strength
// zeta = (||j_2||^2 - |<j_1|j_2>|^2)^(n/2) * xi.

namespace epr {

inline constexpr double default_ep_tol = 1e-8;

struct EpCertificate {
    bool ok = false;
    double nilpotency_residual = 0.0;  // ||N^n||_F / ||N||_F^n
    int rank_of_n = 0;
    std::string diagnostics;
};

struct EpSystem {
    ComplexMatrix h0;
    Complex eigenvalue_ep;
    int order = 0;
    ComplexMatrix nilpotent;                 // N = H0 - E_ep
    std::vector<ComplexMatrix> green_coeffs; // G_1..G_n, G_k = N^{k-1}
    std::vector<ComplexVector> jordan_chain; // j_1..j_n
    double xi = 0.0;
    double zeta = 0.0;
};

// trace(H0)/n; exact at an exceptional point because the nilpotent part is
// traceless.
inline Complex estimate_ep_eigenvalue(const ComplexMatrix& h0) {
    require_square(h0, "estimate_ep_eigenvalue");
    if (h0.rows() == 0) throw InvalidInput("estimate_ep_eigenvalue: empty matrix");
    return h0.trace() / static_cast<double>(h0.rows());
}

inline ComplexMatrix shifted_hamiltonian(const ComplexMatrix& h0, Complex eigenvalue_ep) {
    ComplexMatrix n = h0;
    for (std::size_t i = 0; i < n.rows(); ++i) n(i, i) -= eigenvalue_ep;
    return n;
}

// Machine-checkable witness that H0 sits at an exceptional point of the given
// order: N^order vanishes relative to ||N||^order, N^(order-1) does not, and
// the kernel of N is one-dimensional.
inline EpCertificate verify_ep(const ComplexMatrix& h0, Complex eigenvalue_ep, int order,
                               double tol = default_ep_tol) {
    require_square(h0, "verify_ep");
    require_finite(h0, "verify_ep");
    if (order < 2) throw InvalidInput("verify_ep: order must be at least 2");
    if (h0.rows() > max_dimension) throw InvalidInput("verify_ep: dimension above supported maximum");
    if (static_cast<int>(h0.rows()) != order)
        throw DimensionMismatch(
            "verify_ep: Hamiltonian dimension must equal the order (project onto the "
            "generalized eigenspace first)");
    if (tol <= 0.0) throw InvalidInput("verify_ep: tol must be positive");

    const ComplexMatrix n = shifted_hamiltonian(h0, eigenvalue_ep);
    const double nn = frobenius_norm(n);

    EpCertificate cert;
    cert.rank_of_n = numerical_rank(n);

    std::ostringstream diag;
    if (nn == 0.0) {
        cert.ok = false;
        cert.nilpotency_residual = 0.0;
        diag << "shifted Hamiltonian vanishes: eigenvalue degeneracy with geometric multiplicity "
             << order << " (diabolic point, expected geometric multiplicity 1)";
        cert.diagnostics = diag.str();
        return cert;
    }

    const double norm_pow_order = std::pow(nn, order);
    const double norm_pow_lower = std::pow(nn, order - 1);
    const double res_order = frobenius_norm(matrix_power(n, static_cast<unsigned>(order)));
    const double res_lower = frobenius_norm(matrix_power(n, static_cast<unsigned>(order - 1)));

    cert.nilpotency_residual = res_order / norm_pow_order;
    const bool nilpotent_ok = res_order <= tol * norm_pow_order;
    const bool index_ok = res_lower > tol * norm_pow_lower;
    const bool rank_ok = cert.rank_of_n == order - 1;
    cert.ok = nilpotent_ok && index_ok && rank_ok;

    if (!nilpotent_ok)
        diag << "N^" << order << " does not vanish (relative residual " << cert.nilpotency_residual
             << "); ";
    if (!index_ok)
        diag << "N^" << (order - 1) << " vanishes, so the degeneracy order is below " << order
             << "; ";
    if (!rank_ok)
        diag << "geometric multiplicity is " << (order - cert.rank_of_n) << " (expected 1, rank of N = "
             << cert.rank_of_n << "); ";
    if (cert.ok) diag << "exceptional point of order " << order;
    cert.diagnostics = diag.str();
    return cert;
}

namespace detail {

inline constexpr double chain_residual_tol = 1e-9;
inline constexpr double chain_ortho_tol = 1e-10;

// Impose <j_1|j_1> = 1 and <j_n|j_l> = 0 (l < n) on a chain that already
// satisfies the chain relations. The scaling coefficient is real positive; any
// admissible redefinition adds multiples of lower chain vectors with fixed
// coefficients across rows, and since span{j_1..j_{n-1}} is unchanged by such
// a transformation the orthogonality conditions reduce to a linear system for
// the added coefficients.
inline std::vector<ComplexVector> impose_chain_conditions(std::vector<ComplexVector> chain) {
    const int order = static_cast<int>(chain.size());
    const double n1 = norm(chain[0]);
    if (n1 == 0.0) throw ChainSolveFailure("jordan_chain: vanishing eigenvector");
    for (auto& v : chain) v = Complex{1.0 / n1, 0.0} * v;

    if (order >= 2) {
        // gamma_2..gamma_n from <k_m | k_n + sum_a gamma_a k_{n+1-a}> = 0.
        const std::size_t m = static_cast<std::size_t>(order) - 1;
        ComplexMatrix gram(m, m);
        ComplexVector rhs(m);
        for (std::size_t row = 0; row < m; ++row) {
            for (std::size_t a = 0; a < m; ++a)
                gram(row, a) = inner(chain[row], chain[static_cast<std::size_t>(order) - 2 - a]);
            rhs[row] = -inner(chain[row], chain[static_cast<std::size_t>(order) - 1]);
        }
        const ComplexVector gamma = lu_solve(gram, rhs);

        std::vector<ComplexVector> adjusted;
        adjusted.reserve(chain.size());
        for (int l = 0; l < order; ++l) {
            ComplexVector v = chain[l];
            for (int a = 0; a < l; ++a) v = v + gamma[a] * chain[l - 1 - a];
            adjusted.push_back(std::move(v));
        }
        chain = std::move(adjusted);
    }
    return chain;
}

inline std::vector<ComplexVector> jordan_chain_impl(const ComplexMatrix& n_op, int order,
                                                    double scale) {
    const std::size_t n = n_op.rows();

    // Kernel direction, phase-fixed so the largest entry is real positive.
    const Svd f = svd(n_op);
    ComplexVector j1 = f.v.column(n - 1);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(j1[i]) > std::abs(j1[imax])) imax = i;
    if (std::abs(j1[imax]) > 0.0) j1 = (std::abs(j1[imax]) / j1[imax]) * j1;
    j1 = normalized(j1);

    std::vector<ComplexVector> chain{j1};
    for (int l = 1; l < order; ++l) {
        auto sol = min_norm_solve(n_op, chain.back());
        if (sol.residual > chain_residual_tol * (1.0 + scale))
            throw ChainSolveFailure("jordan_chain: least-squares residual too large at link " +
                                    std::to_string(l + 1));
        chain.push_back(std::move(sol.x));
    }

    chain = impose_chain_conditions(std::move(chain));

    // Enforced conditions, re-checked.
    if (std::abs(inner(chain[0], chain[0]) - Complex{1.0, 0.0}) > chain_ortho_tol)
        throw ChainSolveFailure("jordan_chain: eigenvector normalization failed");
    for (int l = 0; l + 1 < order; ++l)
        if (std::abs(inner(chain.back(), chain[l])) >
            chain_ortho_tol * std::max(1.0, norm(chain.back())))
            throw ChainSolveFailure("jordan_chain: orthogonality condition failed");
    for (int l = 1; l < order; ++l)
        if (norm(n_op * chain[l] - chain[l - 1]) > chain_residual_tol * (1.0 + scale))
            throw ChainSolveFailure("jordan_chain: chain relation violated after redefinition");
    return chain;
}

} // namespace detail

inline std::vector<ComplexVector> jordan_chain(const ComplexMatrix& h0, Complex eigenvalue_ep,
                                               int order, double tol = default_ep_tol) {
    const EpCertificate cert = verify_ep(h0, eigenvalue_ep, order, tol);
    if (!cert.ok) throw NotAnEp("jordan_chain: " + cert.diagnostics);
    return detail::jordan_chain_impl(shifted_hamiltonian(h0, eigenvalue_ep), order,
                                     frobenius_norm(h0));
}

// xi = ||G_n||, identical for the spectral and Frobenius norms since G_n has
// rank one; the Frobenius form is the cheap one.
inline double spectral_response_strength(const EpSystem& sys) {
    return frobenius_norm(sys.green_coeffs.back());
}

inline double eigenstate_response_strength(const EpSystem& sys) {
    const ComplexVector& j1 = sys.jordan_chain[0];
    const ComplexVector& j2 = sys.jordan_chain[1];
    const double gap = norm(j2) * norm(j2) - std::norm(inner(j1, j2));
    return std::pow(std::max(gap, 0.0), 0.5 * sys.order) * sys.xi;
}

inline EpSystem build_ep_system(const ComplexMatrix& h0, Complex eigenvalue_ep, int order,
                                double tol = default_ep_tol) {
    const EpCertificate cert = verify_ep(h0, eigenvalue_ep, order, tol);
    if (!cert.ok) throw NotAnEp("build_ep_system: " + cert.diagnostics);

    EpSystem sys;
    sys.h0 = h0;
    sys.eigenvalue_ep = eigenvalue_ep;
    sys.order = order;
    sys.nilpotent = shifted_hamiltonian(h0, eigenvalue_ep);
    sys.green_coeffs.reserve(order);
    sys.green_coeffs.push_back(ComplexMatrix::identity(h0.rows()));
    for (int k = 1; k < order; ++k)
        sys.green_coeffs.push_back(sys.green_coeffs.back() * sys.nilpotent);
    sys.jordan_chain = detail::jordan_chain_impl(sys.nilpotent, order, frobenius_norm(h0));
    sys.xi = spectral_response_strength(sys);
    sys.zeta = eigenstate_response_strength(sys);
    return sys;
}

// Gamma = i(H0 - H0^dag), symmetrized to machine precision.
inline ComplexMatrix decay_operator(const ComplexMatrix& h0) {
    require_square(h0, "decay_operator");
    require_finite(h0, "decay_operator");
    const Complex i{0.0, 1.0};
    ComplexMatrix gamma = i * (h0 - h0.adjoint());
    return Complex{0.5, 0.0} * (gamma + gamma.adjoint());
}

struct PassivityReport {
    bool is_passive = false;
    std::vector<double> gamma_eigenvalues;       // descending
    std::optional<double> eigenvalue_ratio;      // largest/second-largest; absent when rank-1-like
    std::optional<double> xi_upper_bound;        // only derived for order 2 and 3
    double trace_check = 0.0;                    // trace(Gamma), = n * (-2 Im E_ep) at an EP
    bool bound_violated = false;                 // passive yet xi above the bound
};

// Passivity means the decay operator is positive semidefinite (no gain). For
// passive systems xi is bounded: 2|Im E_ep| at order 2, 4 sqrt(3) |Im E_ep|^2
// at order 3; no bound is derived here for higher order. The eigenvalue ratio
// R = lambda_1/lambda_2 measures how close Gamma is to a single decay channel;
// R is reported as absent when lambda_2 is below tol (rank-1-like).
inline PassivityReport passivity_report(const EpSystem& sys, double tol = 1e-12) {
    PassivityReport rep;
    const ComplexMatrix gamma = decay_operator(sys.h0);
    auto psd = is_positive_semidefinite(gamma, tol);
    rep.is_passive = psd.ok;
    rep.gamma_eigenvalues = std::move(psd.eigenvalues);
    rep.trace_check = gamma.trace().real();

    if (rep.gamma_eigenvalues.size() >= 2 && rep.gamma_eigenvalues[1] > tol)
        rep.eigenvalue_ratio = rep.gamma_eigenvalues[0] / rep.gamma_eigenvalues[1];

    const double im = std::abs(sys.eigenvalue_ep.imag());
    if (sys.order == 2)
        rep.xi_upper_bound = 2.0 * im;
    else if (sys.order == 3)
        rep.xi_upper_bound = 4.0 * std::sqrt(3.0) * im * im;

    if (rep.is_passive && rep.xi_upper_bound)
        rep.bound_violated = sys.xi > *rep.xi_upper_bound * (1.0 + 1e-9) + 1e-30;
    return rep;
}

// Radius of the pseudospectrum disk around an order-n exceptional point:
// (eps_tilde * xi)^(1/n).
inline double pseudospectral_radius(double xi, double eps_tilde, int order) {
    if (!(xi > 0.0)) throw InvalidInput("pseudospectral_radius: xi must be positive");
    if (!(eps_tilde > 0.0)) throw InvalidInput("pseudospectral_radius: eps_tilde must be positive");
    if (order < 1) throw InvalidInput("pseudospectral_radius: order must be positive");
    return std::pow(eps_tilde * xi, 1.0 / static_cast<double>(order));
}

} // namespace epr
