#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

#include "agora/errors.hpp"

namespace agora {

namespace detail {

// splitmix64; used to decorrelate stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Deterministic random source. Draws are generated from the standardized
// mt19937_64 sequence with hand-rolled transforms (uniform via the top 53
// bits, normal via Box-Muller) so that identical seeds reproduce identical
// streams on every platform, independent of the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::mix64(seed)) {}

    // Independent substream: same master seed, different stream tag.
    static Rng stream(std::uint64_t seed, std::uint64_t tag) {
        return Rng(detail::mix64(seed) ^ detail::mix64(tag * 0x9e3779b97f4a7c15ULL + 1));
    }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Index draw by inverse CDF over an (unnormalized is rejected) probability vector.
    std::size_t categorical(std::span<const double> probs) {
        if (probs.empty()) {
            throw InputError("categorical draw over empty support");
        }
        const double u = uniform();
        double cum = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            cum += probs[k];
            if (u < cum) {
                return k;
            }
        }
        return probs.size() - 1; // u landed in rounding slack at the top
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace agora
