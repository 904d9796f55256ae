#include <cmath>
#include <limits>

#include "doctest.h"

#include "arsar/error.hpp"
#include "arsar/metrics.hpp"
#include "support.hpp"

using namespace arsar;
using namespace arsar::metrics;

namespace {

ComplexImage filled(std::size_t rows, std::size_t cols, double v) {
    ComplexImage a(rows, cols);
    for (auto& z : a.data()) z = v;
    return a;
}

ComplexImage ramp(std::size_t n) {
    ComplexImage a(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = std::polar(double((r * 7 + c * 3) % 11), 0.3 * double(c));
    return a;
}

}  // namespace

TEST_CASE("nrmse fixtures") {
    const auto x = ramp(8);
    CHECK(nrmse(x, x) == 0.0);
    CHECK(nrmse(ComplexImage(8, 8), x) == 1.0);

    const auto ones = filled(4, 4, 1.0);
    auto hole = ones;
    hole(2, 1) = 0.0;
    CHECK(nrmse(hole, ones) == 1.0 / 16.0);

    CHECK_THROWS_AS(nrmse(ones, ComplexImage(4, 4)), InvalidArgument);
    CHECK_THROWS_AS(nrmse(ones, filled(4, 5, 1.0)), ShapeError);
}

TEST_CASE("nrmse is monotone in the blend weight") {
    const auto ones = filled(4, 4, 1.0);
    auto other = ones;
    other(0, 0) = 3.0;
    other(3, 2) = 0.25;
    // blend = c * other + (1 - c) * ones; the error shrinks as |1 - c| grows to 1
    double prev = std::numeric_limits<double>::infinity();
    for (double c : {1.0, 0.9, 0.7, 0.4, 0.0}) {
        const double e = nrmse(cplx(c) * other + cplx(1.0 - c) * ones, ones);
        CHECK(e <= prev);
        prev = e;
    }
    CHECK(prev == 0.0);
    // pure scaling of the all-ones image: error is exactly |1 - c|
    for (double c : {0.0, 0.5, 0.75, 1.25, 2.0}) CHECK(nrmse(cplx(c) * ones, ones) == doctest::Approx(std::abs(1 - c)));
}

TEST_CASE("psnr literal formula") {
    std::vector<double> truth(16, 255.0), est(16, 254.0);
    const auto p = psnr_pixels(est, truth);
    CHECK_FALSE(p.perfect);
    CHECK(std::abs(p.db - 24.0654) <= 1e-3);
    CHECK(p.db == doctest::Approx(10.0 * std::log10(255.0)).epsilon(1e-14));
    const auto sq = psnr_pixels(est, truth, PsnrConvention::squared);
    CHECK(sq.db == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-14));

    // MSE x 100 costs exactly 20 dB
    std::vector<double> far(16, 245.0);
    CHECK(psnr_pixels(far, truth).db == doctest::Approx(p.db - 20.0).epsilon(1e-12));
    CHECK(psnr_pixels(truth, truth).perfect);
    CHECK(format_psnr(psnr_pixels(truth, truth)) == "perfect");
}

TEST_CASE("psnr on complex images") {
    const auto x = ramp(8);
    CHECK(psnr(x, x).perfect);
    auto y = x;
    y(1, 1) += 2.0;
    y(5, 2) *= 0.5;
    const double base = psnr(y, x).db;
    CHECK(std::isfinite(base));
    // a common scale before normalization does not matter
    CHECK(psnr(cplx(2.0) * y, cplx(2.0) * x).db == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("psnr falls as noise grows") {
    const auto x = ramp(16);
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        Rng rng(5);
        auto y = x;
        for (auto& z : y.data()) z += sigma * rng.complex_normal();
        const double db = psnr(y, x).db;
        CHECK(db < prev);
        prev = db;
    }
}

TEST_CASE("ssim") {
    const auto x = ramp(8);
    CHECK(ssim(x, x) == 1.0);
    const auto c = filled(4, 4, 3.0);
    CHECK(ssim(c, c) == 1.0);
    CHECK(ssim(ComplexImage(4, 4), ComplexImage(4, 4)) == 1.0);

    std::vector<double> a(64), inv(64);
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] = (i * 37) % 256;
        inv[i] = 255.0 - a[i];
    }
    CHECK(ssim_pixels(inv, a) < 0.5);

    Rng rng(2);
    std::vector<double> p(50), q(50);
    for (std::size_t i = 0; i < 50; ++i) {
        p[i] = 255.0 * rng.uniform();
        q[i] = 255.0 * rng.uniform();
    }
    CHECK(ssim_pixels(p, q) == ssim_pixels(q, p));
    CHECK(ssim_pixels(p, p) == 1.0);
    CHECK_THROWS_AS(ssim_pixels(std::vector<double>{1.0}, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("ssim matches a direct evaluation") {
    const std::vector<double> a{10, 50, 90, 200, 30, 0};
    const std::vector<double> b{12, 40, 100, 180, 60, 5};
    const double n = 6.0;
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        ma += a[i] / n;
        mb += b[i] / n;
    }
    double va = 0, vb = 0, cov = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        va += (a[i] - ma) * (a[i] - ma) / (n - 1);
        vb += (b[i] - mb) * (b[i] - mb) / (n - 1);
        cov += (a[i] - ma) * (b[i] - mb) / (n - 1);
    }
    const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
    const double expect = (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    CHECK(ssim_pixels(a, b) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("8-bit normalization is keyed to the ground truth") {
    std::vector<double> truth{1.0, 3.0, 2.0}, est{2.0, 5.0, 1.0};
    normalize_8bit(est, truth);
    CHECK(truth == std::vector<double>{0.0, 255.0, 127.5});
    CHECK(est == std::vector<double>{127.5, 510.0, 0.0});

    std::vector<double> ct{4.0, 4.0}, ce{2.0, 4.0};
    normalize_8bit(ce, ct);
    CHECK(ct == std::vector<double>{255.0, 255.0});
    CHECK(ce == std::vector<double>{127.5, 255.0});
}

TEST_CASE("csv rows") {
    CHECK(csv_header() == "name,nrmse,psnr_db,ssim");
    const auto x = ramp(4);
    const auto r = evaluate(x, x);
    CHECK(csv_row("same", r) == "same,0,perfect,1");
}
