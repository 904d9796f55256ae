#pragma once

#include "arsar/complex_image.hpp"

namespace arsar::fft {

enum class Direction { forward, inverse };

/// In-place unitary DFT (1/sqrt(n) scaling) of every row, i.e. along
/// azimuth. Equivalent to right-multiplying by the DFT matrix.
void along_azimuth(ComplexImage& a, Direction dir);

/// In-place unitary DFT of every column, i.e. along range.
void along_range(ComplexImage& a, Direction dir);

/// FFT-ordered frequency grid value for bin k of an n-point transform
/// sampled at `rate`: k*rate/n for k <= n/2, (k-n)*rate/n otherwise, so the grid
/// spans (-rate/2, rate/2].
double fft_frequency(std::size_t k, std::size_t n, double rate);

}  // namespace arsar::fft
