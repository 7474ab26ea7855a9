#ifndef SARQA_RNG_HPP
#define SARQA_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "sarqa/errors.hpp"

namespace sarqa {

// Reproducibility contract: every random quantity in this project comes from
// xoshiro256++ seeded through the SplitMix64 finalizer below. Sub-streams
// (per row, per shuffle replicate) use derive_seed(seed, index), so parallel
// and serial execution produce identical bits.

namespace detail {
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
} // namespace detail

/// Deterministic sub-seed for stream `index` of a run seeded with `seed`.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t s = seed;
    uint64_t a = detail::splitmix64_next(s);
    s = a ^ (0x9E3779B97F4A7C15ull * (index + 1));
    return detail::splitmix64_next(s);
}

/// xoshiro256++ (Blackman & Vigna). State is filled from SplitMix64 so that
/// any 64-bit seed, including 0, yields a valid stream.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& w : state_) w = detail::splitmix64_next(s);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]; never returns 0, so -log(u) is always finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    uint64_t uniform_below(uint64_t bound) {
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Unit-mean exponential deviate via inverse CDF.
    double exponential() { return -std::log(uniform01()); }

    /// Standard normal via Box-Muller; the sine partner is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Gamma deviate with the given shape and unit scale. Integer shapes up
    /// to 64 use a sum of exponentials; other shapes use Marsaglia-Tsang.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw ValidationError("gamma: shape must be > 0");
        const double rounded = std::floor(shape);
        if (rounded == shape && shape <= 64.0) {
            double sum = 0.0;
            for (int i = 0; i < static_cast<int>(rounded); ++i) sum += exponential();
            return sum;
        }
        if (shape < 1.0) {
            // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform01(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace sarqa

#endif
