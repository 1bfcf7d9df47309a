#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "singul/vecmath.hpp"

namespace singul {

/// splitmix64 finalizer; used to derive independent per-trial streams from
/// (seed, stream_index) so results do not depend on scheduling order.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic RNG with explicit distributions (the std:: distribution
/// objects are not pinned down by the standard, so we implement our own to
/// keep outputs reproducible across library versions).
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via the polar (Marsaglia) method.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

    Vec normal_vec(size_t n) {
        Vec r(n);
        for (auto& x : r) x = normal();
        return r;
    }

    /// Uniform direction on the unit sphere in R^n.
    Vec unit_vector(size_t n) {
        while (true) {
            Vec g = normal_vec(n);
            const double m = norm(g);
            if (m > 1e-12) return scaled(g, 1.0 / m);
        }
    }

    size_t index(size_t n) { return static_cast<size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace singul
