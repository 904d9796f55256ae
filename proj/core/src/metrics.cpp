#include "arsar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arsar/error.hpp"
#include "arsar/manifest.hpp"

namespace arsar::metrics {

namespace {

constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void require_pair(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) throw ShapeError(std::string(what) + ": pixel counts differ");
    if (a.empty()) throw InvalidArgument(std::string(what) + ": empty image");
}

}  // namespace

std::vector<double> magnitude(const ComplexImage& a) {
    std::vector<double> m(a.size());
    const auto d = a.data();
    for (std::size_t i = 0; i < d.size(); ++i) m[i] = std::abs(d[i]);
    return m;
}

void normalize_8bit(std::vector<double>& estimate, std::vector<double>& truth) {
    if (truth.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(truth.begin(), truth.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    double offset = 0.0;
    double scale = 1.0;
    if (hi > lo) {
        offset = lo;
        scale = 255.0 / (hi - lo);
    } else if (hi > 0.0) {
        scale = 255.0 / hi;
    }
    for (auto& v : truth) v = (v - offset) * scale;
    for (auto& v : estimate) v = (v - offset) * scale;
}

double nrmse(const ComplexImage& estimate, const ComplexImage& truth) {
    require_same_shape(estimate, truth, "nrmse");
    const auto e = estimate.data();
    const auto t = truth.data();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double mt = std::abs(t[i]);
        num += std::abs(mt - std::abs(e[i]));
        den += mt;
    }
    if (!(den > 0.0)) throw InvalidArgument("nrmse: ground truth is zero");
    return num / den;
}

Psnr psnr_pixels(std::span<const double> estimate, std::span<const double> truth, PsnrConvention conv) {
    require_pair(estimate, truth, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = truth[i] - estimate[i];
        mse += d * d;
    }
    mse /= static_cast<double>(truth.size());
    if (mse == 0.0) return {std::numeric_limits<double>::infinity(), true};
    const double peak = *std::max_element(truth.begin(), truth.end());
    const double num = conv == PsnrConvention::literal ? peak : peak * peak;
    return {10.0 * std::log10(num / mse), false};
}

Psnr psnr(const ComplexImage& estimate, const ComplexImage& truth, PsnrConvention conv) {
    require_same_shape(estimate, truth, "psnr");
    auto e = magnitude(estimate);
    auto t = magnitude(truth);
    normalize_8bit(e, t);
    return psnr_pixels(e, t, conv);
}

double ssim_pixels(std::span<const double> a, std::span<const double> b, double dynamic_range) {
    require_pair(a, b, "ssim");
    if (a.size() < 2) throw InvalidArgument("ssim: needs at least 2 pixels");
    const double n = static_cast<double>(a.size());
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
    }
    const double mu_a = sa / n;
    const double mu_b = sb / n;
    double vaa = 0.0, vbb = 0.0, vab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mu_a;
        const double db = b[i] - mu_b;
        vaa += da * da;
        vbb += db * db;
        vab += da * db;
    }
    vaa /= n - 1.0;
    vbb /= n - 1.0;
    vab /= n - 1.0;
    const double c1 = (kK1 * dynamic_range) * (kK1 * dynamic_range);
    const double c2 = (kK2 * dynamic_range) * (kK2 * dynamic_range);
    // Written so that identical inputs give bitwise-identical numerator and
    // denominator: 2xy == x*x + y*y exactly when x == y.
    const double num = (2.0 * (mu_a * mu_b) + c1) * (2.0 * vab + c2);
    const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (vaa + vbb + c2);
    return num / den;
}

double ssim(const ComplexImage& estimate, const ComplexImage& truth) {
    require_same_shape(estimate, truth, "ssim");
    auto e = magnitude(estimate);
    auto t = magnitude(truth);
    normalize_8bit(e, t);
    return ssim_pixels(e, t);
}

MetricReport evaluate(const ComplexImage& estimate, const ComplexImage& truth, PsnrConvention conv) {
    return {nrmse(estimate, truth), psnr(estimate, truth, conv), ssim(estimate, truth)};
}

std::string format_psnr(const Psnr& p) { return p.perfect ? "perfect" : format_double(p.db); }

std::string csv_header() { return "name,nrmse,psnr_db,ssim"; }

std::string csv_row(const std::string& name, const MetricReport& r) {
    return name + "," + format_double(r.nrmse) + "," + format_psnr(r.psnr) + "," + format_double(r.ssim);
}

}  // namespace arsar::metrics
