#pragma once

#include <cmath>
#include <cstdint>

#include "antnav/geometry.hpp"

namespace antnav {

// Deterministic splitmix64 generator. Used everywhere instead of the
// standard distributions so that results are identical across library
// implementations and platforms.
class Rng {
   public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Derive an independent stream from (seed, stream id).
    static Rng stream(uint64_t seed, uint64_t stream_id) {
        Rng r(seed * 0x9E3779B97F4A7C15ULL + stream_id);
        r.next();
        return r;
    }

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) { return n ? next() % n : 0; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (one value per call, no caching,
    // keeps the stream position predictable).
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

   private:
    uint64_t state_;
};

}  // namespace antnav
