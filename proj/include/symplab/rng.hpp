#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace symplab {

/// Seeded generator with platform-independent derived distributions.
///
/// std::uniform_real_distribution and friends are implementation-defined, so
/// results would differ between standard libraries. Everything here is built
/// directly on the raw 64-bit output of mt19937_64, which is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Index drawn from a probability vector by inverse CDF.
    std::size_t categorical(std::span<const double> weights) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // u landed in the rounding slack above the last partial sum
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0) return i;
        return 0;
    }

    /// Independent child stream; used to give each task its own seed.
    Rng split(std::uint64_t stream) { return Rng(next() ^ mix(stream + 0x9e3779b97f4a7c15ULL)); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer, so nearby seeds give unrelated streams
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace symplab
