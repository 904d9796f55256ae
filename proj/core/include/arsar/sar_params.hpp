#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

namespace arsar {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Strip-map radar constants plus the discretization grid. Rows are range
/// bins, columns are azimuth bins. Defaults are the GaoFen-3 fixture.
struct SarSystemParams {
    double bandwidth = 60e6;          // Hz
    double pulse_width = 45e-6;       // s
    double prf = 1420.0;              // Hz
    double carrier_freq = 5.4e9;      // Hz
    double slant_range_ref = 850e3;   // m
    double velocity = 7500.0;         // m/s
    double range_sample_rate = 66e6;  // Hz, 1.1 x bandwidth
    std::size_t rows = 64;
    std::size_t cols = 64;

    double chirp_rate() const { return bandwidth / pulse_width; }

    /// Throws ParameterError on any violated invariant.
    void validate() const;
};

/// Default radar system on the requested grid.
SarSystemParams default_params(std::size_t rows, std::size_t cols);

/// Parses `key = value` lines (`#` comments). Unknown keys are an error.
/// When `range_sample_rate` is absent it becomes 1.1 x bandwidth.
SarSystemParams parse_params(std::istream& in, SarSystemParams base = {});
SarSystemParams load_params(const std::string& path, SarSystemParams base = {});
/// Writes every field; load_params reads it back exactly.
void save_params(const std::string& path, const SarSystemParams& p);

}  // namespace arsar
