#include "arsar/csa.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "arsar/error.hpp"
#include "arsar/fft.hpp"
#include "arsar/manifest.hpp"

namespace arsar {

namespace {

constexpr double pi = std::numbers::pi;

cplx unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

void hadamard(ComplexImage& a, const ComplexImage& mask, bool conjugate) {
    auto da = a.data();
    const auto dm = mask.data();
    if (conjugate) {
        for (std::size_t i = 0; i < da.size(); ++i) da[i] *= std::conj(dm[i]);
    } else {
        for (std::size_t i = 0; i < da.size(); ++i) da[i] *= dm[i];
    }
}

void require_grid(const PhasePlan& plan, const ComplexImage& a, const char* op) {
    if (a.rows() != plan.rows() || a.cols() != plan.cols()) {
        throw ShapeError(std::string(op) + ": expected " + std::to_string(plan.rows()) + "x" +
                         std::to_string(plan.cols()) + ", got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    }
}

}  // namespace

double migration_factor(const SarSystemParams& p, double f_eta) {
    const double x = kSpeedOfLight * f_eta / (2.0 * p.velocity * p.carrier_freq);
    return std::sqrt(1.0 - x * x);
}

PhasePlan build_phase_plan(const SarSystemParams& p) {
    p.validate();
    const std::size_t M = p.rows;
    const std::size_t N = p.cols;
    const double c = kSpeedOfLight;
    const double kr = p.chirp_rate();
    const double f0 = p.carrier_freq;
    const double r_ref = p.slant_range_ref;
    const double v = p.velocity;
    const double fs = p.range_sample_rate;

    PhasePlan plan{ComplexImage(M, N), ComplexImage(M, N), ComplexImage(M, N), p};

    for (std::size_t n = 0; n < N; ++n) {
        const double f_eta = fft::fft_frequency(n, N, p.prf);
        const double d = migration_factor(p, f_eta);
        if (!(d > 0.0 && d <= 1.0)) {
            throw ParameterError("migration factor D(" + format_double(f_eta) + " Hz) = " + format_double(d) +
                                 " is outside (0, 1]");
        }
        const double km = kr / (1.0 - kr * c * r_ref * f_eta * f_eta / (2.0 * v * v * f0 * f0 * f0 * d * d * d));
        const double cs = 1.0 / d - 1.0;
        const double t_ref = 2.0 * r_ref / (c * d);

        for (std::size_t m = 0; m < M; ++m) {
            const double tau = 2.0 * r_ref / c + (static_cast<double>(m) - static_cast<double>(M) / 2.0) / fs;
            const double f_tau = fft::fft_frequency(m, M, fs);
            const double r = c * tau / 2.0;

            const double dt = tau - t_ref;
            plan.theta_s(m, n) = unit_phasor(pi * km * cs * dt * dt);

            plan.theta_r(m, n) =
                unit_phasor(pi * f_tau * f_tau / (km * (1.0 + cs)) + 4.0 * pi * r_ref * cs * f_tau / c);

            const double dr = r - r_ref;
            plan.theta_a(m, n) = unit_phasor(4.0 * pi * r * f0 * d / c -
                                             4.0 * pi * km * (1.0 + cs) * cs * dr * dr / (c * c));
        }
    }
    return plan;
}

OperatorContext::OperatorContext(PhasePlan plan)
    : OperatorContext(plan, identity_sampling(Axis::range, plan.rows()),
                      identity_sampling(Axis::azimuth, plan.cols())) {}

OperatorContext::OperatorContext(PhasePlan plan, SamplingScheme s_range, SamplingScheme s_azimuth)
    : plan_(std::move(plan)), s_range_(std::move(s_range)), s_azimuth_(std::move(s_azimuth)) {
    if (s_range_.axis != Axis::range || s_azimuth_.axis != Axis::azimuth) {
        throw InvalidArgument("OperatorContext: scheme axes must be (range, azimuth)");
    }
    if (s_range_.full_size != plan_.rows() || s_azimuth_.full_size != plan_.cols()) {
        throw ShapeError("OperatorContext: scheme full sizes do not match the " + std::to_string(plan_.rows()) +
                         "x" + std::to_string(plan_.cols()) + " grid");
    }
}

ComplexImage imaging_M(const PhasePlan& plan, const ComplexImage& y) {
    require_grid(plan, y, "imaging_M");
    ComplexImage a = y;
    fft::along_azimuth(a, fft::Direction::forward);
    hadamard(a, plan.theta_s, false);
    fft::along_range(a, fft::Direction::forward);
    hadamard(a, plan.theta_r, false);
    fft::along_range(a, fft::Direction::inverse);
    hadamard(a, plan.theta_a, false);
    fft::along_azimuth(a, fft::Direction::inverse);
    return a;
}

ComplexImage observation_H(const PhasePlan& plan, const ComplexImage& x) {
    require_grid(plan, x, "observation_H");
    ComplexImage a = x;
    fft::along_azimuth(a, fft::Direction::forward);
    hadamard(a, plan.theta_a, true);
    fft::along_range(a, fft::Direction::forward);
    hadamard(a, plan.theta_r, true);
    fft::along_range(a, fft::Direction::inverse);
    hadamard(a, plan.theta_s, true);
    fft::along_azimuth(a, fft::Direction::inverse);
    return a;
}

ComplexImage observation_G(const OperatorContext& ctx, const ComplexImage& x) {
    auto h = observation_H(ctx.plan(), x);
    if (!ctx.s_range().is_identity()) h = apply_sampling(ctx.s_range(), h);
    if (!ctx.s_azimuth().is_identity()) h = apply_sampling(ctx.s_azimuth(), h);
    return h;
}

ComplexImage imaging_T(const OperatorContext& ctx, const ComplexImage& yd) {
    if (yd.rows() != ctx.down_rows() || yd.cols() != ctx.down_cols()) {
        throw ShapeError("imaging_T: expected " + std::to_string(ctx.down_rows()) + "x" +
                         std::to_string(ctx.down_cols()) + ", got " + std::to_string(yd.rows()) + "x" +
                         std::to_string(yd.cols()));
    }
    ComplexImage up = ctx.s_azimuth().is_identity() ? yd : adjoint_sampling(ctx.s_azimuth(), yd);
    if (!ctx.s_range().is_identity()) up = adjoint_sampling(ctx.s_range(), up);
    return imaging_M(ctx.plan(), up);
}

double estimate_lipschitz(const OperatorContext& ctx, std::size_t iters, const Rng& rng) {
    if (iters == 0) throw InvalidArgument("estimate_lipschitz: iters must be >= 1");
    Rng local = rng;
    ComplexImage x(ctx.rows(), ctx.cols());
    for (auto& v : x.data()) v = local.complex_normal();
    x *= 1.0 / norm(x);

    double estimate = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        auto ax = imaging_T(ctx, observation_G(ctx, x));
        ax *= 2.0;
        estimate = inner(x, ax).real();
        const double n = norm(ax);
        if (n == 0.0) return 0.0;
        ax *= 1.0 / n;
        x = std::move(ax);
    }
    return estimate;
}

}  // namespace arsar
