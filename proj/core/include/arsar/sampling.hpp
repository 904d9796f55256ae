#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/rng.hpp"

namespace arsar {

enum class Axis { range, azimuth };

const char* to_string(Axis a);

/// Random selection of rows (range) or columns (azimuth), stored as a
/// sorted index list. The 0/1 matrix form is never built here.
struct SamplingScheme {
    Axis axis = Axis::azimuth;
    std::size_t full_size = 0;
    std::vector<std::size_t> kept_indices;
    double rate = 1.0;
    std::uint64_t seed = 0;

    std::size_t kept() const noexcept { return kept_indices.size(); }
    bool is_identity() const noexcept { return kept_indices.size() == full_size; }

    friend bool operator==(const SamplingScheme&, const SamplingScheme&) = default;
};

/// k distinct values of [0, n) chosen uniformly (partial Fisher-Yates),
/// returned sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

/// Keeps ceil(rate * full_size) indices drawn uniformly without
/// replacement, then sorted. The result depends only on
/// (full_size, rate, rng seed).
SamplingScheme make_sampling(Axis axis, std::size_t full_size, double rate, const Rng& rng);

/// Scheme that keeps every index.
SamplingScheme identity_sampling(Axis axis, std::size_t full_size);

/// Selects the kept rows (range) or columns (azimuth).
ComplexImage apply_sampling(const SamplingScheme& s, const ComplexImage& a);

/// Zero-fill adjoint of apply_sampling.
ComplexImage adjoint_sampling(const SamplingScheme& s, const ComplexImage& b);

}  // namespace arsar
