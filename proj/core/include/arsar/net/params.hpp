#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arsar/net/tape.hpp"
#include "arsar/net/tensor.hpp"

namespace arsar::net {

enum class Variant { swift, pro };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

struct NetConfig {
    Variant variant = Variant::swift;
    std::size_t num_layers = 3;
    std::size_t base_channels = 4;
    std::size_t pyramid_levels = 2;  // swift
    std::size_t pair_count = 2;      // pro
    std::size_t height = 16;
    std::size_t width = 16;
    std::uint64_t seed = 1;
    NormMode norm = NormMode::batch;
    bool share_weights = false;

    /// Throws InvalidArgument (or ShapeError for swift grids not divisible
    /// by 2^pyramid_levels).
    void validate() const;
    friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// One convolution of a regularizer, with optional normalization after it.
struct ConvDecl {
    std::string name;
    std::size_t cin = 0;
    std::size_t cout = 0;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    bool norm = false;
};

/// Convolutions of one regularizer in declaration order.
///
/// swift: lift, then per level (down<l>, expand<l>), then fuse<l> from the
/// coarsest level up, then proj.
/// pro: lift, up<0..K-1>, down<K-1..0>, proj.
std::vector<ConvDecl> regularizer_layout(const NetConfig& cfg);

struct TensorSpec {
    std::string name;
    Shape shape;
    std::size_t offset = 0;

    std::size_t size() const noexcept { return shape.numel(); }
};

/// Running mean at `offset`, running variance at `offset + channels`.
struct BufferSpec {
    std::string name;
    std::size_t channels = 0;
    std::size_t offset = 0;
};

/// Flat layout: rho_t, mu_t, eta_t, then the regularizer tensors of each
/// layer (one block total when weights are shared).
struct ParamPlan {
    std::vector<TensorSpec> tensors;
    std::vector<BufferSpec> buffers;
    std::size_t num_params = 0;
    std::size_t num_buffers = 0;
    std::size_t blocks = 0;            // regularizer parameter blocks
    std::size_t tensors_per_block = 0;
    std::size_t buffers_per_block = 0;

    friend bool operator==(const ParamPlan& a, const ParamPlan& b) {
        return a.num_params == b.num_params && a.num_buffers == b.num_buffers && a.blocks == b.blocks &&
               a.tensors_per_block == b.tensors_per_block;
    }
};

ParamPlan make_plan(const NetConfig& cfg);

inline constexpr std::size_t kRhoIndex = 0;
inline constexpr std::size_t kMuIndex = 1;
inline constexpr std::size_t kEtaIndex = 2;

struct NetParams {
    NetConfig config;
    ParamPlan plan;
    std::vector<double> values;
    std::vector<double> buffers;

    double rho_t() const { return values[kRhoIndex]; }
    double mu_t() const { return values[kMuIndex]; }
    double eta_t() const { return values[kEtaIndex]; }
    double& rho_t() { return values[kRhoIndex]; }
    double& mu_t() { return values[kMuIndex]; }
    double& eta_t() { return values[kEtaIndex]; }

    /// Spec by name; throws InvalidArgument if absent.
    const TensorSpec& spec(const std::string& name) const;
    Tensor tensor(const TensorSpec& s) const;

    /// Zeroes every regularizer tensor of every block.
    void zero_regularizer();
    bool all_finite() const;
};

inline constexpr double kProProjectionScale = 0.1;

/// rho_t = 0.1, mu_t = 2 / lipschitz, eta_t = 1. Kernels uniform with
/// variance 2/fan_in before a rectifier and 1/fan_in otherwise, each tensor
/// drawn from its own stream of cfg.seed. The pro projection is further
/// scaled by kProProjectionScale. Biases and betas 0, gammas 1, running
/// mean 0 and variance 1.
NetParams init_params(const NetConfig& cfg, double lipschitz);

}  // namespace arsar::net
