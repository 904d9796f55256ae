#include <cmath>
#include <numbers>

#include "doctest.h"

#include "arsar/csa.hpp"
#include "arsar/error.hpp"
#include "arsar/fft.hpp"
#include "support.hpp"

using namespace arsar;
using test::make_ctx;
using test::random_image;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct O(n^2) unitary DFT of every row.
ComplexImage naive_dft_rows(const ComplexImage& a, double sign) {
    const std::size_t n = a.cols();
    ComplexImage out(a.rows(), n);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += a(r, j) * std::polar(1.0, sign * 2.0 * kPi * double(j * k % n) / double(n));
            out(r, k) = acc / std::sqrt(double(n));
        }
    return out;
}

double freq(std::size_t k, std::size_t n, double rate) {
    const double kk = k <= n / 2 ? double(k) : double(k) - double(n);
    return kk * rate / double(n);
}

// Chirp-scaling phases evaluated straight from their closed forms.
struct MaskOracle {
    SarSystemParams p;
    double c = kSpeedOfLight;

    double d(double fe) const {
        const double u = c * fe / (2.0 * p.velocity * p.carrier_freq);
        return std::sqrt(1.0 - u * u);
    }
    double km(double fe) const {
        const double dd = d(fe);
        const double kr = p.bandwidth / p.pulse_width;
        return kr / (1.0 - kr * c * p.slant_range_ref * fe * fe /
                               (2.0 * p.velocity * p.velocity * std::pow(p.carrier_freq, 3) * dd * dd * dd));
    }
    double cs(double fe) const { return 1.0 / d(fe) - 1.0; }
    double tau(std::size_t m) const {
        return 2.0 * p.slant_range_ref / c + (double(m) - double(p.rows / 2)) / p.range_sample_rate;
    }
    cplx theta_s(std::size_t m, std::size_t n) const {
        const double fe = freq(n, p.cols, p.prf);
        const double t = tau(m) - 2.0 * p.slant_range_ref / (c * d(fe));
        return std::polar(1.0, kPi * km(fe) * cs(fe) * t * t);
    }
    cplx theta_r(std::size_t m, std::size_t n) const {
        const double fe = freq(n, p.cols, p.prf);
        const double ft = freq(m, p.rows, p.range_sample_rate);
        return std::polar(1.0, kPi * ft * ft / (km(fe) * (1.0 + cs(fe))) +
                                   4.0 * kPi * p.slant_range_ref * cs(fe) * ft / c);
    }
    cplx theta_a(std::size_t m, std::size_t n) const {
        const double fe = freq(n, p.cols, p.prf);
        const double r = c * tau(m) / 2.0;
        const double dr = r - p.slant_range_ref;
        return std::polar(1.0, 4.0 * kPi * r * p.carrier_freq * d(fe) / c -
                                   4.0 * kPi * km(fe) * (1.0 + cs(fe)) * cs(fe) * dr * dr / (c * c));
    }
};

double max_unit_deviation(const ComplexImage& a) {
    double worst = 0.0;
    for (const auto& z : a.data()) worst = std::max(worst, std::abs(std::abs(z) - 1.0));
    return worst;
}

}  // namespace

TEST_CASE("unitary dft matches the direct sum") {
    const auto a = random_image(3, 12, Rng(1));
    auto f = a;
    fft::along_azimuth(f, fft::Direction::forward);
    CHECK(relative_error(f, naive_dft_rows(a, -1.0)) < 1e-13);
    auto b = a;
    fft::along_azimuth(b, fft::Direction::inverse);
    CHECK(relative_error(b, naive_dft_rows(a, +1.0)) < 1e-13);

    // along_range is the row transform of the transpose
    const auto col = random_image(10, 1, Rng(2));
    auto fc = col;
    fft::along_range(fc, fft::Direction::forward);
    ComplexImage row(1, 10);
    for (std::size_t i = 0; i < 10; ++i) row(0, i) = col(i, 0);
    const auto ref = naive_dft_rows(row, -1.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(fc(i, 0) - ref(0, i)) < 1e-13);

    CHECK(fft::fft_frequency(3, 8, 16.0) == 6.0);
    CHECK(fft::fft_frequency(4, 8, 16.0) == 8.0);
    CHECK(fft::fft_frequency(5, 8, 16.0) == -6.0);
}

TEST_CASE("masks have unit modulus") {
    const auto plan = build_phase_plan(default_params(64, 64));
    CHECK(max_unit_deviation(plan.theta_s) <= 1e-12);
    CHECK(max_unit_deviation(plan.theta_r) <= 1e-12);
    CHECK(max_unit_deviation(plan.theta_a) <= 1e-12);
}

TEST_CASE("masks are pure functions of the parameters") {
    const auto a = build_phase_plan(default_params(32, 16));
    const auto b = build_phase_plan(default_params(32, 16));
    CHECK(a.theta_s == b.theta_s);
    CHECK(a.theta_r == b.theta_r);
    CHECK(a.theta_a == b.theta_a);
}

TEST_CASE("chirp scaling is the identity at zero Doppler") {
    const auto plan = build_phase_plan(default_params(32, 32));
    CHECK(migration_factor(plan.params, 0.0) == 1.0);
    for (std::size_t m = 0; m < 32; ++m) CHECK(plan.theta_s(m, 0) == cplx(1.0, 0.0));
}

TEST_CASE("masks agree with the closed-form phases") {
    const auto p = default_params(16, 16);
    const auto plan = build_phase_plan(p);
    const MaskOracle o{p};
    for (std::size_t m : {0u, 3u, 8u, 15u})
        for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 15u}) {
            CAPTURE(m);
            CAPTURE(n);
            CHECK(std::abs(plan.theta_s(m, n) - o.theta_s(m, n)) < 1e-6);
            CHECK(std::abs(plan.theta_r(m, n) - o.theta_r(m, n)) < 1e-6);
            CHECK(std::abs(plan.theta_a(m, n) - o.theta_a(m, n)) < 1e-6);
        }
}

TEST_CASE("refining the azimuth grid keeps shared frequencies") {
    const auto coarse = build_phase_plan(default_params(32, 32));
    const auto fine = build_phase_plan(default_params(32, 64));
    double worst = 0.0;
    for (std::size_t n = 0; n < 32; ++n) {
        // bin n of the coarse grid sits at bin 2n of the fine grid (n < 16),
        // or at 64 - 2 (32 - n) for the negative half
        const std::size_t nf = n <= 16 ? 2 * n : 64 - 2 * (32 - n);
        for (std::size_t m = 0; m < 32; ++m) {
            worst = std::max(worst, std::abs(coarse.theta_s(m, n) - fine.theta_s(m, nf)));
            worst = std::max(worst, std::abs(coarse.theta_r(m, n) - fine.theta_r(m, nf)));
            worst = std::max(worst, std::abs(coarse.theta_a(m, n) - fine.theta_a(m, nf)));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("prf too high is rejected") {
    auto p = default_params(8, 8);
    p.prf = 2.0 * 2.0 * p.velocity * p.carrier_freq / kSpeedOfLight;
    CHECK_THROWS_AS(build_phase_plan(p), ParameterError);
}

TEST_CASE("M and H are mutual inverses") {
    const auto plan = build_phase_plan(default_params(128, 128));
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto x = random_image(128, 128, Rng(seed));
        CHECK(relative_error(imaging_M(plan, observation_H(plan, x)), x) <= 1e-10);
        CHECK(relative_error(observation_H(plan, imaging_M(plan, x)), x) <= 1e-10);
    }
    const auto p2 = build_phase_plan(default_params(48, 20));
    const auto x = random_image(48, 20, Rng(9));
    CHECK(relative_error(imaging_M(p2, observation_H(p2, x)), x) <= 1e-10);
}

TEST_CASE("operators are linear and map zero to zero") {
    const auto plan = build_phase_plan(default_params(32, 32));
    CHECK(norm(imaging_M(plan, ComplexImage(32, 32))) == 0.0);
    CHECK(norm(observation_H(plan, ComplexImage(32, 32))) == 0.0);
    const auto y1 = random_image(32, 32, Rng(1));
    const auto y2 = random_image(32, 32, Rng(2));
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    const auto lhs = imaging_M(plan, a * y1 + b * y2);
    const auto rhs = a * imaging_M(plan, y1) + b * imaging_M(plan, y2);
    CHECK(relative_error(lhs, rhs) <= 1e-12);
    const auto lh = observation_H(plan, a * y1 + b * y2);
    const auto rh = a * observation_H(plan, y1) + b * observation_H(plan, y2);
    CHECK(relative_error(lh, rh) <= 1e-12);

    const auto ctx = make_ctx(32, 32, 0.5);
    const auto g = observation_G(ctx, a * y1 + b * y2);
    CHECK(relative_error(g, a * observation_G(ctx, y1) + b * observation_G(ctx, y2)) <= 1e-12);
    const auto yd1 = random_image(32, 16, Rng(3));
    const auto yd2 = random_image(32, 16, Rng(4));
    CHECK(relative_error(imaging_T(ctx, a * yd1 + b * yd2), a * imaging_T(ctx, yd1) + b * imaging_T(ctx, yd2)) <=
          1e-12);
}

TEST_CASE("H preserves energy") {
    const auto plan = build_phase_plan(default_params(64, 64));
    ComplexImage x(64, 64);
    x(20, 33) = cplx(0.6, -0.8);
    const auto y = observation_H(plan, x);
    CHECK(std::abs(norm(y) - norm(x)) <= 1e-12 * norm(x));
    // a point target spreads across azimuth
    std::size_t nonzero_cols = 0;
    for (std::size_t c = 0; c < 64; ++c) {
        double e = 0.0;
        for (std::size_t r = 0; r < 64; ++r) e += std::norm(y(r, c));
        nonzero_cols += e > 1e-6;
    }
    CHECK(nonzero_cols > 32);

    const auto r = random_image(64, 64, Rng(8));
    CHECK(std::abs(norm(observation_H(plan, r)) - norm(r)) <= 1e-12 * norm(r));
}

TEST_CASE("G and T reduce to H and M at full sampling") {
    const auto ctx = make_ctx(16, 16, 1.0);
    const auto x = random_image(16, 16, Rng(1));
    CHECK(relative_error(observation_G(ctx, x), observation_H(ctx.plan(), x)) <= 1e-15);
    CHECK(relative_error(imaging_T(ctx, x), imaging_M(ctx.plan(), x)) <= 1e-15);
    CHECK(relative_error(imaging_T(ctx, observation_G(ctx, x)), x) <= 1e-10);
}

TEST_CASE("G output shape and contraction") {
    const auto ctx = make_ctx(32, 32, 0.5, 3, 0.75);
    const auto z = observation_G(ctx, ComplexImage(32, 32));
    CHECK(z.rows() == 24);
    CHECK(z.cols() == 16);
    CHECK(norm(z) == 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = random_image(32, 32, Rng(100 + s));
        CHECK(norm(observation_G(ctx, x)) <= norm(x) * (1.0 + 1e-12));
    }
}

TEST_CASE("T G is not the identity under downsampling") {
    const auto ctx = make_ctx(32, 32, 0.5);
    const auto x = random_image(32, 32, Rng(1));
    CHECK(relative_error(imaging_T(ctx, observation_G(ctx, x)), x) > 0.1);
}

TEST_CASE("G and T are adjoint") {
    for (double rate : {0.5, 0.75}) {
        const auto ctx = make_ctx(64, 64, rate, 21);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Rng rng(s);
            const auto x = random_image(64, 64, rng.split(1));
            const auto y = random_image(ctx.down_rows(), ctx.down_cols(), rng.split(2));
            const cplx lhs = inner(observation_G(ctx, x), y);
            const cplx rhs = inner(x, imaging_T(ctx, y));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * norm(x) * norm(y));
        }
    }
}

TEST_CASE("data-term gradient difference is the constant Hessian") {
    const auto ctx = make_ctx(32, 32, 0.5);
    const auto x1 = random_image(32, 32, Rng(1));
    const auto x2 = random_image(32, 32, Rng(2));
    const auto yd = random_image(32, 16, Rng(3));
    auto grad = [&](const ComplexImage& x) { return cplx(2.0) * imaging_T(ctx, observation_G(ctx, x) - yd); };
    const auto hess = cplx(2.0) * imaging_T(ctx, observation_G(ctx, x1 - x2));
    CHECK(relative_error(grad(x1) - grad(x2), hess) <= 1e-12);
}

TEST_CASE("operators reject mismatched shapes") {
    const auto ctx = make_ctx(16, 16, 0.5);
    CHECK_THROWS_AS(imaging_M(ctx.plan(), ComplexImage(16, 15)), ShapeError);
    CHECK_THROWS_AS(observation_H(ctx.plan(), ComplexImage(15, 16)), ShapeError);
    CHECK_THROWS_AS(observation_G(ctx, ComplexImage(16, 8)), ShapeError);
    CHECK_THROWS_AS(imaging_T(ctx, ComplexImage(16, 16)), ShapeError);
}

TEST_CASE("lipschitz estimate") {
    const auto full = make_ctx(32, 32, 1.0);
    CHECK(std::abs(estimate_lipschitz(full, 50, Rng(1)) - 2.0) <= 1e-6);

    const auto half = make_ctx(32, 32, 0.5);
    const double l50 = estimate_lipschitz(half, 50, Rng(1));
    const double l200 = estimate_lipschitz(half, 200, Rng(1));
    CHECK(l50 > 0.0);
    CHECK(l50 <= 2.0 + 1e-9);
    CHECK(std::abs(l50 - l200) <= 1e-4 * l200);
    CHECK_THROWS_AS(estimate_lipschitz(half, 0, Rng(1)), InvalidArgument);
}
