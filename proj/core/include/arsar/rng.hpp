#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace arsar {

/// Seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard distributions are not, so every variate
/// below is derived from raw engine words by hand, which keeps streams
/// identical across compilers and platforms.
///
/// Child streams are derived with split(): the child seed is a SplitMix64
/// hash of (parent seed, stream id), independent of how many values the
/// parent has already produced.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Unbiased (rejection on the top range).
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via Box-Muller (one variate per call, no caching).
    double normal();

    /// Circular complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal();

    Rng split(std::uint64_t stream_id) const { return Rng(mix(seed_ ^ mix(stream_id + 0x632be59bd9b4e019ULL))); }

    static std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace arsar
