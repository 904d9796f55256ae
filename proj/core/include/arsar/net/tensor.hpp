#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arsar/complex_image.hpp"

namespace arsar::net {

/// [B, C, H, W] extent.
struct Shape {
    std::size_t b = 0, c = 0, h = 0, w = 0;

    std::size_t numel() const noexcept { return b * c * h * w; }
    std::size_t plane() const noexcept { return h * w; }
    friend bool operator==(const Shape&, const Shape&) = default;
    std::string str() const;
};

/// Dense real feature map, NCHW order.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0) : shape(s), data(s.numel(), fill) {}

    double& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
        return data[((b * shape.c + c) * shape.h + y) * shape.w + x];
    }
    double at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
        return data[((b * shape.c + c) * shape.h + y) * shape.w + x];
    }
    double* plane(std::size_t b, std::size_t c) { return data.data() + (b * shape.c + c) * shape.plane(); }
    const double* plane(std::size_t b, std::size_t c) const {
        return data.data() + (b * shape.c + c) * shape.plane();
    }
};

/// Complex image -> [1, 2, H, W] with channel 0 real, channel 1 imaginary.
Tensor split_complex(const ComplexImage& x);
/// Inverse of split_complex for a single-batch, two-channel map.
ComplexImage merge_complex(const Tensor& f);

/// Stacks complex images into [B, 2, H, W]; all must share a shape.
Tensor split_batch(const std::vector<ComplexImage>& xs);
/// Batch element `b` of a two-channel map.
ComplexImage merge_at(const Tensor& f, std::size_t b);
/// Writes `x` into batch element `b` of a two-channel map.
void assign_at(Tensor& f, std::size_t b, const ComplexImage& x);

// Kernels used by the tape. Weight layout is [Cout, Cin, K, K].
std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad);
void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& bias, std::size_t stride, std::size_t pad,
                    Tensor& out);
void conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& grad_out, std::size_t stride, std::size_t pad,
                     Tensor* grad_x, Tensor* grad_w, Tensor* grad_bias);

/// Bilinear resize with half-pixel centres and edge clamping.
void bilinear_forward(const Tensor& x, std::size_t out_h, std::size_t out_w, Tensor& out);
void bilinear_backward(const Tensor& grad_out, Tensor& grad_x);

}  // namespace arsar::net
