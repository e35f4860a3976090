#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "epr/ep.hpp"
#include "epr/lu.hpp"

// The three experiment types against a verified exceptional-point system:
// spectral/eigenstate response to a perturbation, steady-state response to a
// harmonic excitation, and free evolution inside the generalized eigenspace.
// Each carries the dimensionless diagnostic that its bound predicts to be at
// most one.

namespace epr {

struct PerturbationReport {
    double epsilon = 0.0;
    double h1_spectral_norm = 0.0;
    std::vector<Complex> eigenvalues;
    std::vector<ComplexVector> eigenvectors;  // unit norm
    std::vector<ComplexVector> deltas;        // orthogonal to the EP eigenvector
    double x = 0.0;  // max|E_j - E_ep| / (eps ||H1|| xi)^(1/n)
    double y = 0.0;  // max||dpsi_j|| / (eps ||H1|| zeta)^(1/n)
};

struct ExcitationReport {
    double omega = 0.0;
    double power = 0.0;
    ComplexVector steady_state;
    double steady_norm = 0.0;
    double z = 0.0;  // steady_norm |hw - E_ep|^n / (P xi)
    double leading_order_norm = 0.0;
    bool genericity_ok = false;  // G_n p != 0
};

struct DynamicsReport {
    double time = 0.0;
    ComplexVector state;
    double ratio = 0.0;  // ||psi(t)|| / ||psi_ep(t)||
    double bound = 0.0;  // |t|^(n-1) xi / ((n-1)! hbar^(n-1))
    double hbar = 1.0;
};

struct SplittingFit {
    double exponent = 0.0;
    std::vector<double> epsilons;
    std::vector<double> max_splittings;
};

// Component of an eigenvector orthogonal to the EP eigenvector, in the scaling
// with unit component along it: dpsi = v/<psi_ep|v> - psi_ep. This fixes the
// arbitrary global phase of v and is exactly orthogonal to psi_ep.
inline ComplexVector eigenstate_delta(const EpSystem& sys, const ComplexVector& eigenvector) {
    require_finite(eigenvector, "eigenstate_delta");
    if (eigenvector.dim() != sys.h0.rows())
        throw DimensionMismatch("eigenstate_delta: dimension mismatch");
    const ComplexVector& psi_ep = sys.jordan_chain[0];
    const Complex overlap = inner(psi_ep, eigenvector);
    if (std::abs(overlap) < 1e-10)
        throw OrthogonalEigenvector(
            "eigenstate_delta: eigenvector has no component along the EP eigenvector");
    return (Complex{1.0, 0.0} / overlap) * eigenvector - psi_ep;
}

inline PerturbationReport perturb(const EpSystem& sys, const ComplexMatrix& h1, double epsilon) {
    require_finite(h1, "perturb");
    if (h1.rows() != sys.h0.rows() || h1.cols() != sys.h0.cols())
        throw DimensionMismatch("perturb: H1 shape does not match H0");
    if (!(epsilon > 0.0)) throw InvalidInput("perturb: epsilon must be positive");
    if (frobenius_norm(h1) == 0.0) throw ZeroPerturbation("perturb: H1 vanishes");

    PerturbationReport rep;
    rep.epsilon = epsilon;
    rep.h1_spectral_norm = spectral_norm(h1);

    const ComplexMatrix h = sys.h0 + Complex{epsilon, 0.0} * h1;
    auto pairs = eigenpairs(h);
    if (max_eigenpair_residual(h, pairs) > 1e-9 * (1.0 + frobenius_norm(h)))
        throw DegenerateEigensolve("perturb: eigensolver residual above tolerance");

    const double n = static_cast<double>(sys.order);
    double max_shift = 0.0;
    double max_delta = 0.0;
    for (const auto& pr : pairs) {
        rep.eigenvalues.push_back(pr.value);
        rep.eigenvectors.push_back(pr.vector);
        max_shift = std::max(max_shift, std::abs(pr.value - sys.eigenvalue_ep));
        ComplexVector delta = eigenstate_delta(sys, pr.vector);
        max_delta = std::max(max_delta, norm(delta));
        rep.deltas.push_back(std::move(delta));
    }
    rep.x = max_shift / std::pow(epsilon * rep.h1_spectral_norm * sys.xi, 1.0 / n);
    rep.y = max_delta / std::pow(epsilon * rep.h1_spectral_norm * sys.zeta, 1.0 / n);
    return rep;
}

// Steady state of the harmonically driven system, from the full resolvent
// (hbar omega - H0)^{-1} P p. Requires every eigenvalue of H0 to have a
// nonpositive imaginary part (here: Im E_ep <= 0), otherwise no finite
// long-time limit exists.
inline ExcitationReport excite(const EpSystem& sys, const ComplexVector& p, double omega,
                               double power, double hbar = 1.0) {
    require_finite(p, "excite");
    if (p.dim() != sys.h0.rows()) throw DimensionMismatch("excite: excitation dimension mismatch");
    if (std::abs(norm(p) - 1.0) > 1e-10)
        throw InvalidInput("excite: excitation vector must be normalized");
    if (!(hbar > 0.0)) throw InvalidInput("excite: hbar must be positive");
    if (power < 0.0) throw InvalidInput("excite: power must be nonnegative");
    if (sys.eigenvalue_ep.imag() > 1e-12 * std::max(1.0, std::abs(sys.eigenvalue_ep)))
        throw NoSteadyState("excite: eigenvalue has positive imaginary part");

    const Complex hw{hbar * omega, 0.0};
    const Complex detuning = hw - sys.eigenvalue_ep;
    if (std::abs(detuning) < 1e-12)
        throw ResonanceSingular("excite: drive energy coincides with the EP eigenvalue");

    ComplexMatrix lhs = Complex{-1.0, 0.0} * sys.h0;
    for (std::size_t i = 0; i < lhs.rows(); ++i) lhs(i, i) += hw;

    ExcitationReport rep;
    rep.omega = omega;
    rep.power = power;
    rep.steady_state = lu_solve(lhs, Complex{power, 0.0} * p);
    rep.steady_norm = norm(rep.steady_state);

    const double n = static_cast<double>(sys.order);
    const double gnp = norm(sys.green_coeffs.back() * p);
    rep.genericity_ok = gnp > 1e-12 * sys.xi;
    rep.leading_order_norm = power * gnp / std::pow(std::abs(detuning), n);
    rep.z = power > 0.0
                ? rep.steady_norm * std::pow(std::abs(detuning), n) / (power * sys.xi)
                : 0.0;
    return rep;
}

// psi(t) = e^{-i E_ep t / hbar} sum_{j<n} (-it)^j/(j! hbar^j) N^j psi0.
// The series terminates by nilpotency. The ratio to the decayed reference
// ||psi_ep(t)|| is computed prefactor-free so strong decay cannot underflow it.
inline DynamicsReport evolve(const EpSystem& sys, const ComplexVector& psi0, double t,
                             double hbar = 1.0) {
    require_finite(psi0, "evolve");
    if (psi0.dim() != sys.h0.rows()) throw DimensionMismatch("evolve: state dimension mismatch");
    if (std::abs(norm(psi0) - 1.0) > 1e-10)
        throw InvalidInput("evolve: initial state must be normalized");
    if (!(hbar > 0.0)) throw InvalidInput("evolve: hbar must be positive");

    const Complex minus_it{0.0, -t};
    ComplexVector acc = psi0;
    ComplexVector cur = psi0;
    for (int j = 1; j < sys.order; ++j) {
        cur = (minus_it / (hbar * static_cast<double>(j))) * (sys.nilpotent * cur);
        acc = acc + cur;
    }

    const Complex omega_ep = sys.eigenvalue_ep / hbar;
    const Complex prefactor = std::exp(Complex{0.0, -1.0} * omega_ep * t);

    DynamicsReport rep;
    rep.time = t;
    rep.hbar = hbar;
    rep.state = prefactor * acc;
    rep.ratio = norm(acc);
    double factorial = 1.0;
    for (int j = 2; j < sys.order; ++j) factorial *= j;
    rep.bound = std::pow(std::abs(t), sys.order - 1) * sys.xi /
                (factorial * std::pow(hbar, sys.order - 1));
    return rep;
}

// Log-log fit of the maximal eigenvalue shift against the perturbation
// strength; generically the slope is 1/n at an order-n degeneracy.
inline SplittingFit splitting_scaling_probe(const EpSystem& sys, const ComplexMatrix& h1,
                                            const std::vector<double>& eps_grid) {
    require_finite(h1, "splitting_scaling_probe");
    if (h1.rows() != sys.h0.rows() || h1.cols() != sys.h0.cols())
        throw DimensionMismatch("splitting_scaling_probe: H1 shape does not match H0");
    if (eps_grid.size() < 4)
        throw InvalidInput("splitting_scaling_probe: need at least 4 grid points");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0))
            throw InvalidInput("splitting_scaling_probe: grid must be positive");
        if (i > 0 && eps_grid[i] >= eps_grid[i - 1])
            throw InvalidInput("splitting_scaling_probe: grid must be strictly decreasing");
    }
    if (eps_grid.front() / eps_grid.back() < 1e3)
        throw InvalidInput("splitting_scaling_probe: grid must span at least three decades");
    if (frobenius_norm(h1) == 0.0) throw ZeroPerturbation("splitting_scaling_probe: H1 vanishes");

    SplittingFit fit;
    for (double eps : eps_grid) {
        const ComplexMatrix h = sys.h0 + Complex{eps, 0.0} * h1;
        double max_shift = 0.0;
        for (const Complex& e : eigenvalues(h))
            max_shift = std::max(max_shift, std::abs(e - sys.eigenvalue_ep));
        fit.epsilons.push_back(eps);
        fit.max_splittings.push_back(max_shift);
    }

    const std::size_t m = fit.epsilons.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log(fit.epsilons[i]);
        const double ly = std::log(fit.max_splittings[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = m * sxx - sx * sx;
    fit.exponent = (m * sxy - sx * sy) / denom;
    return fit;
}

} // namespace epr
