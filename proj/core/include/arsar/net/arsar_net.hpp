#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"
#include "arsar/net/params.hpp"
#include "arsar/net/regularizer.hpp"
#include "arsar/net/tape.hpp"

namespace arsar::net {

/// Recorded forward pass. Holds a pointer to the OperatorContext it was
/// built with, which must outlive it.
struct ForwardPass {
    Tape tape;
    Var output = 0;
    Var loss = 0;
    bool has_loss = false;
    std::size_t num_params = 0;
    std::size_t batch = 0;

    ComplexImage image(std::size_t b = 0) const { return merge_at(tape.value(output), b); }
};

/// X0 = T(Yd), Z0 = X0, V0 = 0, then per layer the reconstruction,
/// regularizer (on X + V) and multiplier modules. Errors name the layer.
ForwardPass forward_batch(const OperatorContext& ctx, NetParams& params, const std::vector<ComplexImage>& yd,
                          ForwardMode mode = {});

/// Single-sample evaluation-mode forward.
std::pair<ComplexImage, ForwardPass> forward(const OperatorContext& ctx, const NetConfig& cfg, NetParams& params,
                                             const ComplexImage& yd);

/// Records the batch NMPE against `truth` and returns its value.
double attach_nmpe(ForwardPass& pass, const std::vector<ComplexImage>& truth);

/// Gradient of seed * loss for every learnable parameter, laid out like
/// NetParams::values. Consumes the tape.
std::vector<double> backward(ForwardPass& pass, double seed);

/// (1 - rho_t) X + mu_t T[Yd - G(X)] + rho_t (Z - V).
ComplexImage recon_module(const OperatorContext& ctx, const NetParams& params, const ComplexImage& x,
                          const ComplexImage& z, const ComplexImage& v, const ComplexImage& yd);

/// V + eta_t (X - Z).
ComplexImage multiplier_module(const NetParams& params, const ComplexImage& x, const ComplexImage& z,
                               const ComplexImage& v);

/// mean_p (|Xhat| - |X|)^2 / ||X||_2 with |Xhat| smoothed by kMagnitudeEps.
double nmpe_loss(const ComplexImage& xhat, const ComplexImage& xgt);

}  // namespace arsar::net
