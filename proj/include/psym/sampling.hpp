#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "psym/poly.hpp"

namespace psym {

// Deterministic across platforms: mt19937_64 output is fixed by the
// standard, and the mapping to numbers below does not go through the
// implementation-defined std distributions.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double unit() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Rational on the grid lo + k/den in [lo, hi].
    Rational uniform_rational(long lo, long hi, long den = 1000) {
        const std::uint64_t span = std::uint64_t((hi - lo) * den) + 1;
        Rational q(long(engine_() % span), den);
        q.canonicalize();
        return q + lo;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace psym
