#pragma once

#include <cstddef>

#include "arsar/complex_image.hpp"
#include "arsar/rng.hpp"
#include "arsar/sampling.hpp"
#include "arsar/sar_params.hpp"

namespace arsar {

/// The three chirp-scaling phase masks, all M x N and unit-modulus.
///
///   theta_s  chirp scaling          (range time, azimuth frequency)
///   theta_r  range compression+RCMC (range freq, azimuth frequency)
///   theta_a  azimuth compression    (range time, azimuth frequency)
///
/// Frequency axes are FFT-ordered.
struct PhasePlan {
    ComplexImage theta_s;
    ComplexImage theta_r;
    ComplexImage theta_a;
    SarSystemParams params;

    std::size_t rows() const noexcept { return params.rows; }
    std::size_t cols() const noexcept { return params.cols; }
};

/// Range-migration factor D(f) = sqrt(1 - (c f / (2 V f0))^2).
double migration_factor(const SarSystemParams& p, double f_eta);

/// Builds the masks. Throws ParameterError when D(f) leaves (0, 1] on the
/// azimuth grid.
PhasePlan build_phase_plan(const SarSystemParams& p);

/// Operator bundle: masks plus range/azimuth sampling schemes.
/// FFTs are unitary on both axes.
class OperatorContext {
public:
    /// Full sampling on both axes.
    explicit OperatorContext(PhasePlan plan);
    OperatorContext(PhasePlan plan, SamplingScheme s_range, SamplingScheme s_azimuth);

    const PhasePlan& plan() const noexcept { return plan_; }
    const SamplingScheme& s_range() const noexcept { return s_range_; }
    const SamplingScheme& s_azimuth() const noexcept { return s_azimuth_; }

    std::size_t rows() const noexcept { return plan_.rows(); }
    std::size_t cols() const noexcept { return plan_.cols(); }
    std::size_t down_rows() const noexcept { return s_range_.kept(); }
    std::size_t down_cols() const noexcept { return s_azimuth_.kept(); }

private:
    PhasePlan plan_;
    SamplingScheme s_range_;
    SamplingScheme s_azimuth_;
};

/// Echo -> image:  < Fr^H{ Fr[(Y Fa) o Ts] o Tr } o Ta > Fa^H.
ComplexImage imaging_M(const PhasePlan& plan, const ComplexImage& y);

/// Image -> echo, the exact inverse of imaging_M:
/// < Fr^H{ Fr[(X Fa) o Ta*] o Tr* } o Ts* > Fa^H.
ComplexImage observation_H(const PhasePlan& plan, const ComplexImage& x);

/// Downsampled observation: range and azimuth selection of observation_H.
ComplexImage observation_G(const OperatorContext& ctx, const ComplexImage& x);

/// Adjoint of observation_G: zero-fill on both axes, then imaging_M.
ComplexImage imaging_T(const OperatorContext& ctx, const ComplexImage& yd);

/// Power iteration on X -> 2 T(G(X)), the Hessian of ||G(X) - Yd||^2.
/// Returns the Rayleigh quotient after `iters` steps (0 for a zero operator).
double estimate_lipschitz(const OperatorContext& ctx, std::size_t iters, const Rng& rng);

}  // namespace arsar
