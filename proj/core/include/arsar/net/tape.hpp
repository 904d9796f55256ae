#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "arsar/csa.hpp"
#include "arsar/net/tensor.hpp"

namespace arsar::net {

/// Handle to a value recorded on a tape.
using Var = std::size_t;

enum class NormMode { batch, instance };

/// Running statistics of one batch-normalization layer, owned by NetParams.
struct NormBuffers {
    double* mean = nullptr;
    double* var = nullptr;
};

inline constexpr double kNormEps = 1e-5;
inline constexpr double kNormMomentum = 0.1;
inline constexpr double kMagnitudeEps = 1e-12;

/// Reverse-mode recorder over real NCHW tensors.
///
/// Every op evaluates eagerly and stores what its backward needs. A
/// tape is confined to one thread and supports one backward pass.
class Tape {
public:
    Var constant(Tensor t);
    /// Learnable leaf whose gradient lands at `offset` of the flat
    /// parameter gradient.
    Var parameter(Tensor t, std::size_t offset);

    const Tensor& value(Var v) const { return nodes_.at(v).value; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Var conv2d(Var x, Var w, Var bias, std::size_t stride, std::size_t pad);
    /// Per-channel normalization with affine (gamma, beta).
    /// batch mode: batch statistics when `training`, running buffers
    /// otherwise; running buffers are updated when training and `update`.
    /// instance mode: per-sample statistics, buffers unused.
    Var normalize(Var x, Var gamma, Var beta, NormMode mode, bool training, NormBuffers buffers, bool update);
    Var relu(Var x);
    Var resize(Var x, std::size_t out_h, std::size_t out_w);
    Var concat(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    /// One-element `s` times tensor `x`.
    Var scale(Var s, Var x);
    /// observation_G per batch element of a two-channel map.
    Var observe(Var x, const OperatorContext& ctx);
    /// imaging_T per batch element of a two-channel map.
    Var image(Var y, const OperatorContext& ctx);
    /// Batch-mean NMPE against constant ground truth of the same shape.
    Var nmpe(Var xhat, const Tensor& truth);
    /// sum(w * x) as a one-element value.
    Var weighted_sum(Var x, Tensor w);

    /// Propagates `seed` * d(root) to every recorded value and returns the
    /// flat parameter gradient of length `num_params`. Throws UsageError
    /// when called twice.
    std::vector<double> backward(Var root, double seed, std::size_t num_params);
    bool consumed() const noexcept { return consumed_; }

    /// Gradient of a recorded value after backward (zeros if untouched).
    Tensor grad(Var v) const;

    /// Sign pattern of every rectifier input, in recording order.
    const std::vector<std::uint8_t>& relu_pattern() const noexcept { return relu_pattern_; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        std::ptrdiff_t offset = -1;
        std::function<void(Tape&)> back;
    };

    Var push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
    bool needs(Var v) const { return nodes_[v].needs_grad; }
    Tensor& g(Var v);

    std::vector<Node> nodes_;
    std::vector<std::uint8_t> relu_pattern_;
    bool consumed_ = false;
};

}  // namespace arsar::net
