#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"
#include "arsar/rng.hpp"
#include "arsar/sampling.hpp"
#include "arsar/sar_params.hpp"

namespace arsar::test {

inline ComplexImage random_image(std::size_t rows, std::size_t cols, Rng rng) {
    ComplexImage a(rows, cols);
    for (auto& z : a.data()) z = rng.complex_normal();
    return a;
}

inline OperatorContext make_ctx(std::size_t rows, std::size_t cols, double rate_az, std::uint64_t seed = 5,
                                double rate_rg = 1.0) {
    const auto plan = build_phase_plan(default_params(rows, cols));
    const Rng rng(seed);
    return OperatorContext(plan, make_sampling(Axis::range, rows, rate_rg, rng.split(101)),
                           make_sampling(Axis::azimuth, cols, rate_az, rng.split(102)));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("arsar_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace arsar::test
