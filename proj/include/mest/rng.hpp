#pragma once

#include <mest/types.hpp>

#include <cmath>
#include <cstdint>

namespace mest {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace detail

/// Combines a base seed with stream indices (e.g. sample size and replication
/// index) into an independent-looking seed.  Replications seeded this way can
/// run in any order or in parallel with identical results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = base;
    detail::splitmix64(s);
    s ^= detail::splitmix64(s) + a;
    s ^= detail::splitmix64(s) + b;
    return detail::splitmix64(s);
}

/// xoshiro256++ with explicit scalar transforms.  All sampling in the library
/// goes through this type so that output is a pure function of the seed,
/// independent of platform library internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (no cached second value).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double theta = 2.0 * M_PI * uniform01();
        return r * std::cos(theta);
    }

    double exponential() { return -std::log(uniform01()); }

    /// -1 or +1 with equal probability.
    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    /// Gamma(shape, scale=1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    std::uint64_t state_[4];
};

/// Uniform direction on the unit sphere in R^p.
inline Vector random_unit_vector(Index p, Rng& rng) {
    Vector g(p);
    double norm2 = 0.0;
    do {
        for (Index i = 0; i < p; ++i) g[i] = rng.normal();
        norm2 = g.squaredNorm();
    } while (norm2 < 1e-12);
    return g / std::sqrt(norm2);
}

}  // namespace mest
