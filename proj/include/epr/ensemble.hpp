#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "epr/ep.hpp"
#include "epr/histogram.hpp"
#include "epr/models.hpp"
#include "epr/response.hpp"
#include "epr/rng.hpp"

// Deterministic Monte Carlo over random Hamiltonians at an exceptional point.
// Every realization is a pure function of (seed, realization index): each
// index gets its own RNG substream, so results are bitwise independent of the
// worker count and of execution order. Realizations are mapped in parallel into
// a preallocated slot vector and reduced single-threaded.

namespace epr {

enum class StudyKind {
    spectral_x,            // dimensionless eigenvalue response x under perturbation
    passive_bound,         // xi/xi_ub vs log10 R over passive realizations
    strength_correlation,  // log10 xi vs log10 zeta
    intensity_z,           // dimensionless steady-state response z
    dynamics_bound,        // ratio/bound of the free evolution at large t
};

inline const char* study_name(StudyKind s) {
    switch (s) {
        case StudyKind::spectral_x: return "spectral_x";
        case StudyKind::passive_bound: return "passive_bound";
        case StudyKind::strength_correlation: return "strength_correlation";
        case StudyKind::intensity_z: return "intensity_z";
        case StudyKind::dynamics_bound: return "dynamics_bound";
    }
    return "unknown";
}

inline StudyKind study_from_name(const std::string& name) {
    if (name == "spectral_x") return StudyKind::spectral_x;
    if (name == "passive_bound") return StudyKind::passive_bound;
    if (name == "strength_correlation") return StudyKind::strength_correlation;
    if (name == "intensity_z") return StudyKind::intensity_z;
    if (name == "dynamics_bound") return StudyKind::dynamics_bound;
    throw InvalidInput("unknown study: " + name);
}

struct EnsembleConfig {
    StudyKind study = StudyKind::spectral_x;
    int n = 3;
    Complex eigenvalue_ep{0.0, -0.5};
    double epsilon = 1e-7;
    std::uint64_t realizations = 100000;
    std::uint64_t seed = 1;
    int bins = 100;
    std::optional<double> omega;  // intensity study; default resonant Re(E_ep)/hbar
    double hbar = 1.0;
    double time = 1e3;            // dynamics study
    int workers = 1;

    void validate() const {
        if (realizations < 1) throw InvalidInput("ensemble: realizations must be >= 1");
        if (bins < 10) throw InvalidInput("ensemble: bins must be >= 10");
        if (n < 2) throw InvalidInput("ensemble: n must be >= 2");
        if (workers < 1) throw InvalidInput("ensemble: workers must be >= 1");
        if (!(hbar > 0.0)) throw InvalidInput("ensemble: hbar must be positive");
        if (study == StudyKind::passive_bound && n != 2 && n != 3)
            throw InvalidInput("ensemble: passive_bound requires n = 2 or 3");
        if (study == StudyKind::spectral_x && !(epsilon > 0.0))
            throw InvalidInput("ensemble: epsilon must be positive");
    }
};

// Raw per-realization values, before binning. Tests and callers that need
// unbinned data use this; the histogram runners are thin wrappers.
struct StudySample {
    std::vector<double> primary;
    std::vector<double> secondary;  // empty for 1D studies
    std::uint64_t count_total = 0;
    std::uint64_t count_accepted = 0;
    std::uint64_t count_failed = 0;
    bool two_dimensional = false;
    std::string label_primary;
    std::string label_secondary;
    bool log_primary = false;
    bool log_secondary = false;
};

namespace detail {

struct RealizationSlot {
    double a = 0.0;
    double b = 0.0;
    enum class Status : std::uint8_t { accepted, rejected, failed } status = Status::rejected;
};

template <typename Fn>
inline void parallel_realize(std::uint64_t realizations, int workers,
                             std::vector<RealizationSlot>& slots, Fn&& realize) {
    slots.resize(realizations);
    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            try {
                slots[i] = realize(i);
            } catch (const Error&) {
                slots[i].status = RealizationSlot::Status::failed;
            }
        }
    };
    if (workers <= 1 || realizations < 2) {
        run_range(0, realizations);
        return;
    }
    const std::uint64_t chunk = (realizations + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
        if (begin >= realizations) break;
        const std::uint64_t end = std::min(realizations, begin + chunk);
        pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
}

inline StudySample reduce(const std::vector<RealizationSlot>& slots, bool two_d) {
    StudySample s;
    s.count_total = slots.size();
    s.two_dimensional = two_d;
    for (const auto& slot : slots) {
        if (slot.status == RealizationSlot::Status::failed) {
            ++s.count_failed;
        } else if (slot.status == RealizationSlot::Status::accepted) {
            ++s.count_accepted;
            s.primary.push_back(slot.a);
            if (two_d) s.secondary.push_back(slot.b);
        }
    }
    return s;
}

} // namespace detail

inline StudySample collect_study(const EnsembleConfig& cfg) {
    cfg.validate();
    std::vector<detail::RealizationSlot> slots;
    using Slot = detail::RealizationSlot;

    switch (cfg.study) {
        case StudyKind::spectral_x: {
            detail::parallel_realize(cfg.realizations, cfg.workers, slots, [&](std::uint64_t i) {
                RandomStream rng = RandomStream::substream(cfg.seed, i);
                ModelInstance model = random_ep(cfg.n, cfg.eigenvalue_ep, rng);
                const ComplexMatrix h1 = random_perturbation(cfg.n, rng);
                const EpSystem sys =
                    build_ep_system(model.h0, model.eigenvalue_ep, model.order);
                const PerturbationReport rep = perturb(sys, h1, cfg.epsilon);
                return Slot{rep.x, 0.0, Slot::Status::accepted};
            });
            auto s = detail::reduce(slots, false);
            s.label_primary = "x";
            return s;
        }
        case StudyKind::passive_bound: {
            detail::parallel_realize(cfg.realizations, cfg.workers, slots, [&](std::uint64_t i) {
                RandomStream rng = RandomStream::substream(cfg.seed, i);
                ModelInstance model = random_ep(cfg.n, cfg.eigenvalue_ep, rng);
                // Only xi and the decay-operator spectrum are needed; skip the
                // Jordan chain for speed at rejection rates near 1e-3.
                const ComplexMatrix nil = shifted_hamiltonian(model.h0, model.eigenvalue_ep);
                auto psd = is_positive_semidefinite(decay_operator(model.h0), 1e-12);
                if (!psd.ok) return Slot{0.0, 0.0, Slot::Status::rejected};
                const double lambda2 = psd.eigenvalues[1];
                if (!(lambda2 > 1e-12)) return Slot{0.0, 0.0, Slot::Status::rejected};
                const double r = psd.eigenvalues[0] / lambda2;
                const double im = std::abs(cfg.eigenvalue_ep.imag());
                const double xi_ub =
                    cfg.n == 2 ? 2.0 * im : 4.0 * std::sqrt(3.0) * im * im;
                if (!(xi_ub > 0.0)) return Slot{0.0, 0.0, Slot::Status::rejected};
                const double xi =
                    frobenius_norm(matrix_power(nil, static_cast<unsigned>(cfg.n - 1)));
                return Slot{xi / xi_ub, std::log10(r), Slot::Status::accepted};
            });
            auto s = detail::reduce(slots, true);
            s.label_primary = "xi_over_xi_ub";
            s.label_secondary = "log10_R";
            s.log_secondary = true;
            return s;
        }
        case StudyKind::strength_correlation: {
            detail::parallel_realize(cfg.realizations, cfg.workers, slots, [&](std::uint64_t i) {
                RandomStream rng = RandomStream::substream(cfg.seed, i);
                ModelInstance model = random_ep(cfg.n, cfg.eigenvalue_ep, rng);
                const EpSystem sys =
                    build_ep_system(model.h0, model.eigenvalue_ep, model.order);
                return Slot{std::log10(sys.xi), std::log10(sys.zeta), Slot::Status::accepted};
            });
            auto s = detail::reduce(slots, true);
            s.label_primary = "log10_xi";
            s.label_secondary = "log10_zeta";
            s.log_primary = true;
            s.log_secondary = true;
            return s;
        }
        case StudyKind::intensity_z: {
            const double omega = cfg.omega ? *cfg.omega : cfg.eigenvalue_ep.real() / cfg.hbar;
            detail::parallel_realize(cfg.realizations, cfg.workers, slots, [&](std::uint64_t i) {
                RandomStream rng = RandomStream::substream(cfg.seed, i);
                ModelInstance model = random_ep(cfg.n, cfg.eigenvalue_ep, rng);
                const ComplexVector p = rng.next_unit_vector(cfg.n);
                const EpSystem sys =
                    build_ep_system(model.h0, model.eigenvalue_ep, model.order);
                ExcitationReport rep;
                try {
                    rep = excite(sys, p, omega, 1.0, cfg.hbar);
                } catch (const NoSteadyState&) {
                    return Slot{0.0, 0.0, Slot::Status::rejected};
                }
                if (!rep.genericity_ok) return Slot{0.0, 0.0, Slot::Status::rejected};
                return Slot{rep.z, 0.0, Slot::Status::accepted};
            });
            auto s = detail::reduce(slots, false);
            s.label_primary = "z";
            return s;
        }
        case StudyKind::dynamics_bound: {
            detail::parallel_realize(cfg.realizations, cfg.workers, slots, [&](std::uint64_t i) {
                RandomStream rng = RandomStream::substream(cfg.seed, i);
                ModelInstance model = random_ep(cfg.n, cfg.eigenvalue_ep, rng);
                const ComplexVector psi0 = rng.next_unit_vector(cfg.n);
                const EpSystem sys =
                    build_ep_system(model.h0, model.eigenvalue_ep, model.order);
                // Initial states with no overlap against G_n (e.g. the EP
                // eigenvector itself) fall outside the long-time statement.
                if (norm(sys.green_coeffs.back() * psi0) <= 1e-12 * sys.xi)
                    return Slot{0.0, 0.0, Slot::Status::rejected};
                const DynamicsReport rep = evolve(sys, psi0, cfg.time, cfg.hbar);
                return Slot{rep.ratio / rep.bound, 0.0, Slot::Status::accepted};
            });
            auto s = detail::reduce(slots, false);
            s.label_primary = "ratio_over_bound";
            return s;
        }
    }
    throw InvalidInput("collect_study: unknown study");
}

inline HistogramData to_histogram(const StudySample& s, int bins) {
    HistogramData h =
        s.two_dimensional
            ? histogram_2d(s.label_primary, s.primary, s.label_secondary, s.secondary, bins,
                           s.log_primary, s.log_secondary)
            : histogram_1d(s.label_primary, s.primary, bins, s.log_primary);
    h.count_total = s.count_total;
    h.count_failed = s.count_failed;
    return h;
}

inline HistogramData run_study(const EnsembleConfig& cfg) {
    return to_histogram(collect_study(cfg), cfg.bins);
}

inline HistogramData run_spectral_ensemble(const EnsembleConfig& cfg) {
    if (cfg.study != StudyKind::spectral_x) throw InvalidInput("run_spectral_ensemble: wrong study");
    return run_study(cfg);
}
inline HistogramData run_passive_ensemble(const EnsembleConfig& cfg) {
    if (cfg.study != StudyKind::passive_bound) throw InvalidInput("run_passive_ensemble: wrong study");
    return run_study(cfg);
}
inline HistogramData run_correlation_ensemble(const EnsembleConfig& cfg) {
    if (cfg.study != StudyKind::strength_correlation)
        throw InvalidInput("run_correlation_ensemble: wrong study");
    return run_study(cfg);
}
inline HistogramData run_intensity_ensemble(const EnsembleConfig& cfg) {
    if (cfg.study != StudyKind::intensity_z) throw InvalidInput("run_intensity_ensemble: wrong study");
    return run_study(cfg);
}
inline HistogramData run_dynamics_ensemble(const EnsembleConfig& cfg) {
    if (cfg.study != StudyKind::dynamics_bound) throw InvalidInput("run_dynamics_ensemble: wrong study");
    return run_study(cfg);
}

} // namespace epr
