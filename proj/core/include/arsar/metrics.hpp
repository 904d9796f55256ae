#pragma once

#include <span>
#include <string>
#include <vector>

#include "arsar/complex_image.hpp"

namespace arsar::metrics {

/// Literal: 10 log10(max / MSE). Squared: the usual 10 log10(max^2 / MSE).
enum class PsnrConvention { literal, squared };

struct Psnr {
    double db = 0.0;
    bool perfect = false;  // MSE == 0; db is +inf
};

struct MetricReport {
    double nrmse = 0.0;
    Psnr psnr;
    double ssim = 0.0;
};

/// |z| of every entry.
std::vector<double> magnitude(const ComplexImage& a);

/// Maps the ground-truth magnitude range onto [0, 255] and applies the same
/// affine map to the estimate. A constant ground truth is scaled by
/// 255/max instead (identity if it is all zero).
void normalize_8bit(std::vector<double>& estimate, std::vector<double>& truth);

/// sum | |X| - |Xhat| | / sum |X| on raw magnitudes.
double nrmse(const ComplexImage& estimate, const ComplexImage& truth);

Psnr psnr(const ComplexImage& estimate, const ComplexImage& truth,
          PsnrConvention conv = PsnrConvention::literal);

/// Global (single-window) SSIM on 8-bit-normalized magnitudes.
double ssim(const ComplexImage& estimate, const ComplexImage& truth);

MetricReport evaluate(const ComplexImage& estimate, const ComplexImage& truth,
                      PsnrConvention conv = PsnrConvention::literal);

// Pixel-domain formulas on already-normalized images.
Psnr psnr_pixels(std::span<const double> estimate, std::span<const double> truth,
                 PsnrConvention conv = PsnrConvention::literal);
double ssim_pixels(std::span<const double> a, std::span<const double> b, double dynamic_range = 255.0);

/// "perfect" or the shortest round-trip decimal.
std::string format_psnr(const Psnr& p);

/// `name,nrmse,psnr_db,ssim`
std::string csv_header();
std::string csv_row(const std::string& name, const MetricReport& r);

}  // namespace arsar::metrics
