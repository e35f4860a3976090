#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "epr/ep.hpp"
#include "epr/lu.hpp"
#include "epr/matrix.hpp"
#include "epr/rng.hpp"
#include "epr/svd.hpp"

// The analytic model families and the random-matrix construction, each paired
// with closed-form response strengths where they exist so they can serve as
// oracles.

namespace epr {

struct ModelInstance {
    std::string name;
    ComplexMatrix h0;
    Complex eigenvalue_ep{0.0, 0.0};
    int order = 0;
    bool at_ep = false;
    std::optional<double> expected_xi;
    std::optional<double> expected_zeta;
    std::map<std::string, Complex> parameters;
};

// 2x2 upper-triangular Hamiltonian of two degenerate traveling modes with
// one-way backscattering A0; xi = |A0|, zeta = 1/|A0|.
inline ModelInstance asymmetric_backscattering(Complex e0, Complex a0) {
    if (a0 == Complex{0.0, 0.0})
        throw DiabolicPoint("asymmetric_backscattering: A0 = 0 is a diabolic point");
    ModelInstance m;
    m.name = "asymmetric_backscattering";
    m.h0 = ComplexMatrix{{e0, a0}, {Complex{0.0, 0.0}, e0}};
    m.eigenvalue_ep = e0;
    m.order = 2;
    m.at_ep = true;
    m.expected_xi = std::abs(a0);
    m.expected_zeta = 1.0 / std::abs(a0);
    m.parameters = {{"E0", e0}, {"A0", a0}};
    return m;
}

// Two coupled modes with balanced gain and loss. Degenerate at g = alpha;
// there the pair coalesces into a second-order exceptional point with
// eigenvector (1, -i)/sqrt(2) and xi = 2g.
inline ModelInstance pt_dimer(double omega0, double alpha, double g) {
    if (alpha < 0.0 || g < 0.0) throw InvalidInput("pt_dimer: alpha and g must be nonnegative");
    const Complex i{0.0, 1.0};
    ModelInstance m;
    m.name = "pt_dimer";
    m.h0 = ComplexMatrix{{omega0 + i * alpha, g}, {g, omega0 - i * alpha}};
    m.eigenvalue_ep = Complex{omega0, 0.0};
    m.order = 2;
    m.at_ep = g > 0.0 && std::abs(g - alpha) <= 1e-12 * std::max(g, alpha);
    if (m.at_ep) {
        m.expected_xi = 2.0 * g;
        m.expected_zeta = 1.0 / (2.0 * g);
    }
    m.parameters = {{"omega0", Complex{omega0, 0.0}},
                    {"alpha", Complex{alpha, 0.0}},
                    {"g", Complex{g, 0.0}}};
    return m;
}

// Three-site chain with gain on one end and loss on the other; at
// alpha = sqrt(2) g the characteristic polynomial has a triple root and the
// system is a third-order exceptional point with xi = 4g^2, zeta = 1/(2g).
inline ModelInstance pt_trimer(double omega0, double g) {
    if (!(g > 0.0)) throw InvalidInput("pt_trimer: g must be positive");
    const double alpha = std::sqrt(2.0) * g;
    const Complex i{0.0, 1.0};
    ModelInstance m;
    m.name = "pt_trimer";
    m.h0 = ComplexMatrix{{omega0 + i * alpha, g, 0.0},
                         {g, Complex{omega0, 0.0}, g},
                         {0.0, g, omega0 - i * alpha}};
    m.eigenvalue_ep = Complex{omega0, 0.0};
    m.order = 3;
    m.at_ep = true;
    m.expected_xi = 4.0 * g * g;
    m.expected_zeta = 1.0 / (2.0 * g);
    m.parameters = {{"omega0", Complex{omega0, 0.0}},
                    {"alpha", Complex{alpha, 0.0}},
                    {"g", Complex{g, 0.0}}};
    return m;
}

// Unidirectional nearest-neighbor hopping chain (the fully asymmetric limit of
// the Hatano-Nelson model): an order-n exceptional point with
// xi = |A0|^(n-1), zeta = 1/|A0|.
inline ModelInstance hatano_nelson(Complex e0, Complex a0, int n) {
    if (n < 2) throw InvalidInput("hatano_nelson: n must be at least 2");
    if (static_cast<std::size_t>(n) > max_dimension)
        throw InvalidInput("hatano_nelson: n above supported maximum");
    if (a0 == Complex{0.0, 0.0}) throw DiabolicPoint("hatano_nelson: A0 = 0 is a diabolic point");
    ModelInstance m;
    m.name = "hatano_nelson";
    m.h0 = ComplexMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        m.h0(i, i) = e0;
        if (i + 1 < n) m.h0(i, i + 1) = a0;
    }
    m.eigenvalue_ep = e0;
    m.order = n;
    m.at_ep = true;
    m.expected_xi = std::pow(std::abs(a0), n - 1);
    m.expected_zeta = 1.0 / std::abs(a0);
    m.parameters = {{"E0", e0}, {"A0", a0}};
    return m;
}

inline constexpr double random_ep_condition_cap = 1e8;

// H0 = Q J Q^{-1} with J the order-n Jordan block at eigenvalue_ep (unit
// superdiagonal) and Q filled with i.i.d. complex entries whose real and
// imaginary parts are uniform on [-1/2, 1/2). Q is resampled while its
// condition number exceeds the cap, so the similarity does not wreck the
// verification tolerances.
inline ModelInstance random_ep(int n, Complex eigenvalue_ep, RandomStream& rng) {
    if (n < 2) throw InvalidInput("random_ep: n must be at least 2");
    if (static_cast<std::size_t>(n) > max_dimension)
        throw InvalidInput("random_ep: n above supported maximum");

    ComplexMatrix q;
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
        q = rng.next_matrix_box(n);
        found = condition_number(q) <= random_ep_condition_cap;
    }
    if (!found) throw SingularTransform("random_ep: no acceptably conditioned transform found");

    ComplexMatrix j(n, n);
    for (int i = 0; i < n; ++i) {
        j(i, i) = eigenvalue_ep;
        if (i + 1 < n) j(i, i + 1) = Complex{1.0, 0.0};
    }

    ModelInstance m;
    m.name = "random_ep";
    m.h0 = (q * j) * inverse(q);
    m.eigenvalue_ep = eigenvalue_ep;
    m.order = n;
    m.at_ep = true;
    return m;
}

inline ModelInstance random_ep(int n, Complex eigenvalue_ep, std::uint64_t rng_seed) {
    RandomStream rng(rng_seed);
    return random_ep(n, eigenvalue_ep, rng);
}

// n x n matrix of i.i.d. complex entries, real and imaginary parts uniform on
// [-1/2, 1/2).
inline ComplexMatrix random_perturbation(int n, RandomStream& rng) {
    if (n < 1) throw InvalidInput("random_perturbation: n must be positive");
    if (static_cast<std::size_t>(n) > max_dimension)
        throw InvalidInput("random_perturbation: n above supported maximum");
    return rng.next_matrix_box(n);
}

inline ComplexMatrix random_perturbation(int n, std::uint64_t rng_seed) {
    RandomStream rng(rng_seed);
    return random_perturbation(n, rng);
}

} // namespace epr
