#include "arsar/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arsar/error.hpp"

namespace arsar {

const char* to_string(Axis a) { return a == Axis::range ? "range" : "azimuth"; }

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw InvalidArgument("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

SamplingScheme make_sampling(Axis axis, std::size_t full_size, double rate, const Rng& rng) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw InvalidArgument("sampling rate must be in (0, 1], got " + std::to_string(rate));
    }
    if (full_size == 0) throw InvalidArgument("sampling full_size must be >= 1");

    const auto count = std::min<std::size_t>(
        full_size, static_cast<std::size_t>(std::ceil(rate * static_cast<double>(full_size))));

    Rng local = rng;
    SamplingScheme s;
    s.axis = axis;
    s.full_size = full_size;
    s.kept_indices = sample_without_replacement(full_size, count, local);
    s.rate = rate;
    s.seed = rng.seed();
    return s;
}

SamplingScheme identity_sampling(Axis axis, std::size_t full_size) {
    SamplingScheme s;
    s.axis = axis;
    s.full_size = full_size;
    s.kept_indices.resize(full_size);
    std::iota(s.kept_indices.begin(), s.kept_indices.end(), std::size_t{0});
    s.rate = 1.0;
    return s;
}

namespace {

void check_full(const SamplingScheme& s, const ComplexImage& a, const char* op) {
    const auto extent = s.axis == Axis::range ? a.rows() : a.cols();
    if (extent != s.full_size) {
        throw ShapeError(std::string(op) + ": " + to_string(s.axis) + " extent " + std::to_string(extent) +
                         " != scheme full size " + std::to_string(s.full_size));
    }
}

}  // namespace

ComplexImage apply_sampling(const SamplingScheme& s, const ComplexImage& a) {
    check_full(s, a, "apply_sampling");
    const auto& idx = s.kept_indices;
    if (s.axis == Axis::range) {
        ComplexImage out(idx.size(), a.cols());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(idx[r], c);
        }
        return out;
    }
    ComplexImage out(a.rows(), idx.size());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = a(r, idx[c]);
    }
    return out;
}

ComplexImage adjoint_sampling(const SamplingScheme& s, const ComplexImage& b) {
    const auto& idx = s.kept_indices;
    const auto extent = s.axis == Axis::range ? b.rows() : b.cols();
    if (extent != idx.size()) {
        throw ShapeError(std::string("adjoint_sampling: ") + to_string(s.axis) + " extent " +
                         std::to_string(extent) + " != kept count " + std::to_string(idx.size()));
    }
    if (s.axis == Axis::range) {
        ComplexImage out(s.full_size, b.cols());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < b.cols(); ++c) out(idx[r], c) = b(r, c);
        }
        return out;
    }
    ComplexImage out(b.rows(), s.full_size);
    for (std::size_t r = 0; r < b.rows(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, idx[c]) = b(r, c);
    }
    return out;
}

}  // namespace arsar
