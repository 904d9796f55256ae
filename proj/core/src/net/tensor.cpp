#include "arsar/net/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "arsar/error.hpp"

namespace arsar::net {

std::string Shape::str() const {
    return "[" + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + "]";
}

Tensor split_complex(const ComplexImage& x) {
    Tensor t(Shape{1, 2, x.rows(), x.cols()});
    assign_at(t, 0, x);
    return t;
}

ComplexImage merge_complex(const Tensor& f) {
    if (f.shape.c != 2) throw ShapeError("merge_complex: expected 2 channels, got " + std::to_string(f.shape.c));
    if (f.shape.b != 1) throw ShapeError("merge_complex: expected batch 1, got " + std::to_string(f.shape.b));
    return merge_at(f, 0);
}

Tensor split_batch(const std::vector<ComplexImage>& xs) {
    if (xs.empty()) throw InvalidArgument("split_batch: empty batch");
    Tensor t(Shape{xs.size(), 2, xs[0].rows(), xs[0].cols()});
    for (std::size_t b = 0; b < xs.size(); ++b) {
        require_same_shape(xs[b], xs[0], "split_batch");
        assign_at(t, b, xs[b]);
    }
    return t;
}

ComplexImage merge_at(const Tensor& f, std::size_t b) {
    if (f.shape.c != 2) throw ShapeError("merge_at: expected 2 channels, got " + std::to_string(f.shape.c));
    ComplexImage x(f.shape.h, f.shape.w);
    const double* re = f.plane(b, 0);
    const double* im = f.plane(b, 1);
    auto d = x.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = {re[i], im[i]};
    return x;
}

void assign_at(Tensor& f, std::size_t b, const ComplexImage& x) {
    if (f.shape.c != 2 || f.shape.h != x.rows() || f.shape.w != x.cols()) {
        throw ShapeError("assign_at: image does not fit " + f.shape.str());
    }
    double* re = f.plane(b, 0);
    double* im = f.plane(b, 1);
    const auto d = x.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        re[i] = d[i].real();
        im[i] = d[i].imag();
    }
}

std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    if (in + 2 * pad < k) throw ShapeError("conv: kernel larger than padded input");
    return (in + 2 * pad - k) / stride + 1;
}

namespace {

// Output columns ox for which ix = ox*stride + kx - pad lies inside [0, in_w).
void valid_range(std::size_t out_w, std::size_t in_w, std::size_t stride, std::size_t kx, std::size_t pad,
                 std::size_t& lo, std::size_t& hi) {
    const long s = static_cast<long>(stride);
    const long off = static_cast<long>(kx) - static_cast<long>(pad);
    long l = off >= 0 ? 0 : (-off + s - 1) / s;
    long h = (static_cast<long>(in_w) - 1 - off);
    h = h < 0 ? -1 : h / s;
    h = std::min(h, static_cast<long>(out_w) - 1);
    lo = static_cast<std::size_t>(std::max(l, 0L));
    hi = h < l ? lo : static_cast<std::size_t>(h + 1);
}

}  // namespace

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& bias, std::size_t stride, std::size_t pad,
                    Tensor& out) {
    const auto& xs = x.shape;
    const auto& ws = w.shape;  // [cout, cin, k, k]
    if (ws.c != xs.c) throw ShapeError("conv2d: weight expects " + std::to_string(ws.c) + " input channels, got " + xs.str());
    const std::size_t k = ws.h;
    const std::size_t oh = conv_out_extent(xs.h, k, stride, pad);
    const std::size_t ow = conv_out_extent(xs.w, k, stride, pad);
    out = Tensor(Shape{xs.b, ws.b, oh, ow});

    std::vector<std::size_t> lo_x(k), hi_x(k), lo_y(k), hi_y(k);
    for (std::size_t kk = 0; kk < k; ++kk) {
        valid_range(ow, xs.w, stride, kk, pad, lo_x[kk], hi_x[kk]);
        valid_range(oh, xs.h, stride, kk, pad, lo_y[kk], hi_y[kk]);
    }

    for (std::size_t b = 0; b < xs.b; ++b) {
        for (std::size_t co = 0; co < ws.b; ++co) {
            double* o = out.plane(b, co);
            std::fill(o, o + oh * ow, bias.data[co]);
            for (std::size_t ci = 0; ci < xs.c; ++ci) {
                const double* in = x.plane(b, ci);
                for (std::size_t ky = 0; ky < k; ++ky) {
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const double wv = w.at(co, ci, ky, kx);
                        for (std::size_t oy = lo_y[ky]; oy < hi_y[ky]; ++oy) {
                            const std::size_t iy = oy * stride + ky - pad;
                            const double* row = in + iy * xs.w;
                            double* orow = o + oy * ow;
                            if (stride == 1) {
                                const double* src = row + kx - pad;
                                for (std::size_t ox = lo_x[kx]; ox < hi_x[kx]; ++ox) orow[ox] += wv * src[ox];
                            } else {
                                for (std::size_t ox = lo_x[kx]; ox < hi_x[kx]; ++ox) {
                                    orow[ox] += wv * row[ox * stride + kx - pad];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

void conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& grad_out, std::size_t stride, std::size_t pad,
                     Tensor* grad_x, Tensor* grad_w, Tensor* grad_bias) {
    const auto& xs = x.shape;
    const auto& ws = w.shape;
    const auto& gs = grad_out.shape;
    const std::size_t k = ws.h;
    const std::size_t oh = gs.h;
    const std::size_t ow = gs.w;

    std::vector<std::size_t> lo_x(k), hi_x(k), lo_y(k), hi_y(k);
    for (std::size_t kk = 0; kk < k; ++kk) {
        valid_range(ow, xs.w, stride, kk, pad, lo_x[kk], hi_x[kk]);
        valid_range(oh, xs.h, stride, kk, pad, lo_y[kk], hi_y[kk]);
    }

    for (std::size_t b = 0; b < xs.b; ++b) {
        for (std::size_t co = 0; co < ws.b; ++co) {
            const double* g = grad_out.plane(b, co);
            if (grad_bias) {
                double s = 0.0;
                for (std::size_t i = 0; i < oh * ow; ++i) s += g[i];
                grad_bias->data[co] += s;
            }
            for (std::size_t ci = 0; ci < xs.c; ++ci) {
                const double* in = x.plane(b, ci);
                double* gin = grad_x ? grad_x->plane(b, ci) : nullptr;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const double wv = w.at(co, ci, ky, kx);
                        double acc = 0.0;
                        for (std::size_t oy = lo_y[ky]; oy < hi_y[ky]; ++oy) {
                            const std::size_t iy = oy * stride + ky - pad;
                            const double* grow = g + oy * ow;
                            const double* row = in + iy * xs.w;
                            double* girow = gin ? gin + iy * xs.w : nullptr;
                            for (std::size_t ox = lo_x[kx]; ox < hi_x[kx]; ++ox) {
                                const std::size_t ix = ox * stride + kx - pad;
                                acc += grow[ox] * row[ix];
                                if (girow) girow[ix] += wv * grow[ox];
                            }
                        }
                        if (grad_w) grad_w->at(co, ci, ky, kx) += acc;
                    }
                }
            }
        }
    }
}

namespace {

struct Tap {
    std::size_t i0, i1;
    double w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
    std::vector<Tap> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
        double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
        if (src < 0.0) src = 0.0;
        auto i0 = static_cast<std::size_t>(std::floor(src));
        if (i0 > in - 1) i0 = in - 1;
        const std::size_t i1 = std::min(i0 + 1, in - 1);
        taps[o] = {i0, i1, src - static_cast<double>(i0)};
    }
    return taps;
}

}  // namespace

void bilinear_forward(const Tensor& x, std::size_t out_h, std::size_t out_w, Tensor& out) {
    const auto& s = x.shape;
    out = Tensor(Shape{s.b, s.c, out_h, out_w});
    const auto ty = bilinear_taps(s.h, out_h);
    const auto tx = bilinear_taps(s.w, out_w);
    for (std::size_t b = 0; b < s.b; ++b) {
        for (std::size_t c = 0; c < s.c; ++c) {
            const double* in = x.plane(b, c);
            double* o = out.plane(b, c);
            for (std::size_t y = 0; y < out_h; ++y) {
                const auto& a = ty[y];
                const double* r0 = in + a.i0 * s.w;
                const double* r1 = in + a.i1 * s.w;
                for (std::size_t xx = 0; xx < out_w; ++xx) {
                    const auto& t = tx[xx];
                    const double top = (1.0 - t.w1) * r0[t.i0] + t.w1 * r0[t.i1];
                    const double bot = (1.0 - t.w1) * r1[t.i0] + t.w1 * r1[t.i1];
                    o[y * out_w + xx] = (1.0 - a.w1) * top + a.w1 * bot;
                }
            }
        }
    }
}

void bilinear_backward(const Tensor& grad_out, Tensor& grad_x) {
    const auto& s = grad_x.shape;
    const auto& g = grad_out.shape;
    const auto ty = bilinear_taps(s.h, g.h);
    const auto tx = bilinear_taps(s.w, g.w);
    for (std::size_t b = 0; b < s.b; ++b) {
        for (std::size_t c = 0; c < s.c; ++c) {
            const double* go = grad_out.plane(b, c);
            double* gi = grad_x.plane(b, c);
            for (std::size_t y = 0; y < g.h; ++y) {
                const auto& a = ty[y];
                for (std::size_t xx = 0; xx < g.w; ++xx) {
                    const auto& t = tx[xx];
                    const double v = go[y * g.w + xx];
                    gi[a.i0 * s.w + t.i0] += (1.0 - a.w1) * (1.0 - t.w1) * v;
                    gi[a.i0 * s.w + t.i1] += (1.0 - a.w1) * t.w1 * v;
                    gi[a.i1 * s.w + t.i0] += a.w1 * (1.0 - t.w1) * v;
                    gi[a.i1 * s.w + t.i1] += a.w1 * t.w1 * v;
                }
            }
        }
    }
}

}  // namespace arsar::net
