#pragma once

#include <cstddef>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/net/params.hpp"
#include "arsar/net/tape.hpp"

namespace arsar::net {

struct ForwardMode {
    bool training = false;        // batch statistics in batch-norm layers
    bool update_buffers = false;  // fold batch statistics into running buffers
};

/// Tape handles of one regularizer block, parallel to regularizer_layout.
struct BlockVars {
    std::vector<Var> weight;
    std::vector<Var> bias;
    std::vector<Var> gamma;  // valid only where the decl has norm
    std::vector<Var> beta;
    std::vector<NormBuffers> buffers;
};

/// Records block `block` of `params` as learnable leaves.
BlockVars bind_block(Tape& tape, NetParams& params, std::size_t block);

/// Records the regularizer on a [B, 2, H, W] input. When `trace` is given,
/// the shape after each stage is appended (input first, output last).
Var regularizer_graph(Tape& tape, const NetConfig& cfg, const BlockVars& vars, Var input, ForwardMode mode,
                      std::vector<Shape>* trace = nullptr);

/// Swift regularizer of block `block` on one complex image, evaluation mode.
ComplexImage regularizer_swift(const NetParams& params, std::size_t block, const ComplexImage& w,
                               std::vector<Shape>* trace = nullptr);
/// Pro regularizer of block `block` on one complex image, evaluation mode.
ComplexImage regularizer_pro(const NetParams& params, std::size_t block, const ComplexImage& w,
                             std::vector<Shape>* trace = nullptr);

}  // namespace arsar::net
