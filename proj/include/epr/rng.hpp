#pragma once

#include <array>
#include <cstdint>

#include "epr/matrix.hpp"

namespace epr {

// SplitMix64 step; used for seeding and for deriving substream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with SplitMix64 state fill. Substreams are keyed by
// (seed, index) so ensemble realizations are reproducible and independent of
// execution order and worker count.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t key = seed;
        std::uint64_t mixer = index + 0x632be59bd9b4e019ULL;
        key ^= splitmix64(mixer);
        return RandomStream(key);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // [-1/2, 1/2)
    double uniform_pm_half() { return uniform01() - 0.5; }

    // Real and imaginary parts independently uniform on [-1/2, 1/2).
    Complex next_complex_box() {
        double re = uniform_pm_half();
        double im = uniform_pm_half();
        return {re, im};
    }

    ComplexMatrix next_matrix_box(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = next_complex_box();
        return m;
    }

    ComplexVector next_vector_box(std::size_t n) {
        ComplexVector v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = next_complex_box();
        return v;
    }

    // Unit vector from box entries; resamples the (measure-zero) tiny-norm case.
    ComplexVector next_unit_vector(std::size_t n) {
        for (;;) {
            ComplexVector v = next_vector_box(n);
            double nv = norm(v);
            if (nv > 1e-6) return Complex{1.0 / nv, 0.0} * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace epr
