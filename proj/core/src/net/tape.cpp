#include "arsar/net/tape.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "arsar/error.hpp"

namespace arsar::net {

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
    if (consumed_) throw UsageError("tape: recording after backward");
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

Tensor& Tape::g(Var v) {
    auto& n = nodes_[v];
    if (n.grad.data.empty()) n.grad = Tensor(n.value.shape);
    return n.grad;
}

Var Tape::constant(Tensor t) { return push(std::move(t), false, {}); }

Var Tape::parameter(Tensor t, std::size_t offset) {
    const Var v = push(std::move(t), true, {});
    nodes_[v].offset = static_cast<std::ptrdiff_t>(offset);
    return v;
}

Var Tape::conv2d(Var x, Var w, Var bias, std::size_t stride, std::size_t pad) {
    Tensor out;
    conv2d_forward(value(x), value(w), value(bias), stride, pad, out);
    const bool ng = needs(x) || needs(w) || needs(bias);
    const Var self = nodes_.size();
    return push(std::move(out), ng, [=](Tape& t) {
        const Tensor& go = t.nodes_[self].grad;
        conv2d_backward(t.value(x), t.value(w), go, stride, pad, t.needs(x) ? &t.g(x) : nullptr,
                        t.needs(w) ? &t.g(w) : nullptr, t.needs(bias) ? &t.g(bias) : nullptr);
    });
}

Var Tape::normalize(Var x, Var gamma, Var beta, NormMode mode, bool training, NormBuffers buffers, bool update) {
    const Tensor& in = value(x);
    const Shape s = in.shape;
    const auto& gm = value(gamma).data;
    const auto& bt = value(beta).data;
    if (gm.size() != s.c || bt.size() != s.c) throw ShapeError("normalize: affine size != channels " + s.str());

    const bool per_instance = mode == NormMode::instance;
    const bool use_stats = per_instance || training;
    const std::size_t groups = per_instance ? s.b * s.c : s.c;
    const std::size_t count = per_instance ? s.plane() : s.b * s.plane();
    if (use_stats && count < 2) throw ShapeError("normalize: fewer than 2 values per channel " + s.str());
    if (!use_stats && (buffers.mean == nullptr || buffers.var == nullptr)) {
        throw UsageError("normalize: evaluation mode needs running buffers");
    }

    // inv_std and the normalized map are what backward needs.
    std::vector<double> mean(groups), inv_std(groups);
    auto group_of = [per_instance, nc = s.c](std::size_t b, std::size_t c) { return per_instance ? b * nc + c : c; };

    if (use_stats) {
        std::vector<double> sum(groups, 0.0), sq(groups, 0.0);
        for (std::size_t b = 0; b < s.b; ++b) {
            for (std::size_t c = 0; c < s.c; ++c) {
                const double* p = in.plane(b, c);
                double acc = 0.0;
                for (std::size_t i = 0; i < s.plane(); ++i) acc += p[i];
                sum[group_of(b, c)] += acc;
            }
        }
        for (std::size_t k = 0; k < groups; ++k) mean[k] = sum[k] / static_cast<double>(count);
        for (std::size_t b = 0; b < s.b; ++b) {
            for (std::size_t c = 0; c < s.c; ++c) {
                const double* p = in.plane(b, c);
                const double m = mean[group_of(b, c)];
                double acc = 0.0;
                for (std::size_t i = 0; i < s.plane(); ++i) acc += (p[i] - m) * (p[i] - m);
                sq[group_of(b, c)] += acc;
            }
        }
        for (std::size_t k = 0; k < groups; ++k) {
            const double var = sq[k] / static_cast<double>(count);
            inv_std[k] = 1.0 / std::sqrt(var + kNormEps);
            if (!per_instance && update && buffers.mean != nullptr) {
                const double unbiased = sq[k] / static_cast<double>(count - 1);
                buffers.mean[k] = (1.0 - kNormMomentum) * buffers.mean[k] + kNormMomentum * mean[k];
                buffers.var[k] = (1.0 - kNormMomentum) * buffers.var[k] + kNormMomentum * unbiased;
            }
        }
    } else {
        for (std::size_t k = 0; k < groups; ++k) {
            mean[k] = buffers.mean[k];
            inv_std[k] = 1.0 / std::sqrt(buffers.var[k] + kNormEps);
        }
    }

    Tensor xhat(s), out(s);
    for (std::size_t b = 0; b < s.b; ++b) {
        for (std::size_t c = 0; c < s.c; ++c) {
            const std::size_t k = group_of(b, c);
            const double* p = in.plane(b, c);
            double* h = xhat.plane(b, c);
            double* o = out.plane(b, c);
            for (std::size_t i = 0; i < s.plane(); ++i) {
                h[i] = (p[i] - mean[k]) * inv_std[k];
                o[i] = gm[c] * h[i] + bt[c];
            }
        }
    }

    const bool ng = needs(x) || needs(gamma) || needs(beta);
    const Var self = nodes_.size();
    return push(std::move(out), ng,
                [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t) {
                    const Tensor& go = t.nodes_[self].grad;
                    const auto& gmv = t.value(gamma).data;
                    if (t.needs(gamma) || t.needs(beta)) {
                        for (std::size_t b = 0; b < s.b; ++b) {
                            for (std::size_t c = 0; c < s.c; ++c) {
                                const double* gp = go.plane(b, c);
                                const double* h = xhat.plane(b, c);
                                double dg = 0.0, db = 0.0;
                                for (std::size_t i = 0; i < s.plane(); ++i) {
                                    dg += gp[i] * h[i];
                                    db += gp[i];
                                }
                                if (t.needs(gamma)) t.g(gamma).data[c] += dg;
                                if (t.needs(beta)) t.g(beta).data[c] += db;
                            }
                        }
                    }
                    if (!t.needs(x)) return;
                    Tensor& gx = t.g(x);
                    if (!use_stats) {
                        for (std::size_t b = 0; b < s.b; ++b) {
                            for (std::size_t c = 0; c < s.c; ++c) {
                                const double f = gmv[c] * inv_std[c];
                                const double* gp = go.plane(b, c);
                                double* gi = gx.plane(b, c);
                                for (std::size_t i = 0; i < s.plane(); ++i) gi[i] += f * gp[i];
                            }
                        }
                        return;
                    }
                    // dx = inv_std * (dh - mean(dh) - h * mean(dh * h)), dh = gamma * dy
                    std::vector<double> m1(groups, 0.0), m2(groups, 0.0);
                    for (std::size_t b = 0; b < s.b; ++b) {
                        for (std::size_t c = 0; c < s.c; ++c) {
                            const std::size_t k = group_of(b, c);
                            const double* gp = go.plane(b, c);
                            const double* h = xhat.plane(b, c);
                            double a1 = 0.0, a2 = 0.0;
                            for (std::size_t i = 0; i < s.plane(); ++i) {
                                a1 += gp[i];
                                a2 += gp[i] * h[i];
                            }
                            m1[k] += gmv[c] * a1;
                            m2[k] += gmv[c] * a2;
                        }
                    }
                    for (std::size_t k = 0; k < groups; ++k) {
                        m1[k] /= static_cast<double>(count);
                        m2[k] /= static_cast<double>(count);
                    }
                    for (std::size_t b = 0; b < s.b; ++b) {
                        for (std::size_t c = 0; c < s.c; ++c) {
                            const std::size_t k = group_of(b, c);
                            const double* gp = go.plane(b, c);
                            const double* h = xhat.plane(b, c);
                            double* gi = gx.plane(b, c);
                            for (std::size_t i = 0; i < s.plane(); ++i) {
                                gi[i] += inv_std[k] * (gmv[c] * gp[i] - m1[k] - h[i] * m2[k]);
                            }
                        }
                    }
                });
}

Var Tape::relu(Var x) {
    Tensor out = value(x);
    for (double& v : out.data) {
        const bool on = v > 0.0;
        relu_pattern_.push_back(on ? 1 : 0);
        if (!on) v = 0.0;
    }
    const Var self = nodes_.size();
    return push(std::move(out), needs(x), [=](Tape& t) {
        const auto& go = t.nodes_[self].grad.data;
        const auto& in = t.value(x).data;
        auto& gx = t.g(x).data;
        for (std::size_t i = 0; i < go.size(); ++i) {
            if (in[i] > 0.0) gx[i] += go[i];
        }
    });
}

Var Tape::resize(Var x, std::size_t out_h, std::size_t out_w) {
    Tensor out;
    bilinear_forward(value(x), out_h, out_w, out);
    const Var self = nodes_.size();
    return push(std::move(out), needs(x), [=](Tape& t) { bilinear_backward(t.nodes_[self].grad, t.g(x)); });
}

Var Tape::concat(Var a, Var b) {
    const Shape sa = value(a).shape;
    const Shape sb = value(b).shape;
    if (sa.b != sb.b || sa.h != sb.h || sa.w != sb.w) throw ShapeError("concat: " + sa.str() + " vs " + sb.str());
    Tensor out(Shape{sa.b, sa.c + sb.c, sa.h, sa.w});
    const std::size_t pa = sa.c * sa.plane();
    const std::size_t pb = sb.c * sb.plane();
    for (std::size_t i = 0; i < sa.b; ++i) {
        std::copy_n(value(a).data.data() + i * pa, pa, out.data.data() + i * (pa + pb));
        std::copy_n(value(b).data.data() + i * pb, pb, out.data.data() + i * (pa + pb) + pa);
    }
    const Var self = nodes_.size();
    return push(std::move(out), needs(a) || needs(b), [=](Tape& t) {
        const auto& go = t.nodes_[self].grad.data;
        for (std::size_t i = 0; i < sa.b; ++i) {
            if (t.needs(a)) {
                auto& ga = t.g(a).data;
                for (std::size_t j = 0; j < pa; ++j) ga[i * pa + j] += go[i * (pa + pb) + j];
            }
            if (t.needs(b)) {
                auto& gb = t.g(b).data;
                for (std::size_t j = 0; j < pb; ++j) gb[i * pb + j] += go[i * (pa + pb) + pa + j];
            }
        }
    });
}

Var Tape::add(Var a, Var b) {
    if (!(value(a).shape == value(b).shape)) {
        throw ShapeError("add: " + value(a).shape.str() + " vs " + value(b).shape.str());
    }
    Tensor out = value(a);
    const auto& vb = value(b).data;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += vb[i];
    const Var self = nodes_.size();
    return push(std::move(out), needs(a) || needs(b), [=](Tape& t) {
        const auto& go = t.nodes_[self].grad.data;
        if (t.needs(a)) {
            auto& ga = t.g(a).data;
            for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
        }
        if (t.needs(b)) {
            auto& gb = t.g(b).data;
            for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i];
        }
    });
}

Var Tape::sub(Var a, Var b) {
    if (!(value(a).shape == value(b).shape)) {
        throw ShapeError("sub: " + value(a).shape.str() + " vs " + value(b).shape.str());
    }
    Tensor out = value(a);
    const auto& vb = value(b).data;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= vb[i];
    const Var self = nodes_.size();
    return push(std::move(out), needs(a) || needs(b), [=](Tape& t) {
        const auto& go = t.nodes_[self].grad.data;
        if (t.needs(a)) {
            auto& ga = t.g(a).data;
            for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
        }
        if (t.needs(b)) {
            auto& gb = t.g(b).data;
            for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
        }
    });
}

Var Tape::scale(Var s, Var x) {
    if (value(s).data.size() != 1) throw ShapeError("scale: factor must have one element");
    const double k = value(s).data[0];
    Tensor out = value(x);
    for (double& v : out.data) v *= k;
    const Var self = nodes_.size();
    return push(std::move(out), needs(s) || needs(x), [=](Tape& t) {
        const auto& go = t.nodes_[self].grad.data;
        if (t.needs(s)) {
            const auto& xv = t.value(x).data;
            double acc = 0.0;
            for (std::size_t i = 0; i < go.size(); ++i) acc += go[i] * xv[i];
            t.g(s).data[0] += acc;
        }
        if (t.needs(x)) {
            const double kk = t.value(s).data[0];
            auto& gx = t.g(x).data;
            for (std::size_t i = 0; i < go.size(); ++i) gx[i] += kk * go[i];
        }
    });
}

namespace {

// Applies a complex linear map to each batch element of a two-channel map.
template <class Op>
Tensor apply_batch(const Tensor& in, std::size_t out_h, std::size_t out_w, Op op) {
    Tensor out(Shape{in.shape.b, 2, out_h, out_w});
    for (std::size_t b = 0; b < in.shape.b; ++b) assign_at(out, b, op(merge_at(in, b)));
    return out;
}

void accumulate(Tensor& dst, const Tensor& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

Var Tape::observe(Var x, const OperatorContext& ctx) {
    const Shape s = value(x).shape;
    if (s.c != 2 || s.h != ctx.rows() || s.w != ctx.cols()) {
        throw ShapeError("observe: input " + s.str() + " does not match operator grid");
    }
    const OperatorContext* c = &ctx;
    Tensor out = apply_batch(value(x), ctx.down_rows(), ctx.down_cols(),
                             [c](const ComplexImage& im) { return observation_G(*c, im); });
    const Var self = nodes_.size();
    return push(std::move(out), needs(x), [=](Tape& t) {
        const Tensor gi = apply_batch(t.nodes_[self].grad, s.h, s.w,
                                      [c](const ComplexImage& im) { return imaging_T(*c, im); });
        accumulate(t.g(x), gi);
    });
}

Var Tape::image(Var y, const OperatorContext& ctx) {
    const Shape s = value(y).shape;
    if (s.c != 2 || s.h != ctx.down_rows() || s.w != ctx.down_cols()) {
        throw ShapeError("image: input " + s.str() + " does not match downsampled grid");
    }
    const OperatorContext* c = &ctx;
    Tensor out = apply_batch(value(y), ctx.rows(), ctx.cols(),
                             [c](const ComplexImage& im) { return imaging_T(*c, im); });
    const Var self = nodes_.size();
    return push(std::move(out), needs(y), [=](Tape& t) {
        const Tensor gi = apply_batch(t.nodes_[self].grad, s.h, s.w,
                                      [c](const ComplexImage& im) { return observation_G(*c, im); });
        accumulate(t.g(y), gi);
    });
}

Var Tape::nmpe(Var xhat, const Tensor& truth) {
    const Tensor& est = value(xhat);
    const Shape s = est.shape;
    if (!(s == truth.shape) || s.c != 2) throw ShapeError("nmpe: " + s.str() + " vs " + truth.shape.str());
    const std::size_t n = s.plane();
    std::vector<double> norm(s.b);
    double loss = 0.0;
    for (std::size_t b = 0; b < s.b; ++b) {
        const double* tr = truth.plane(b, 0);
        const double* ti = truth.plane(b, 1);
        double nn = 0.0;
        for (std::size_t i = 0; i < n; ++i) nn += tr[i] * tr[i] + ti[i] * ti[i];
        norm[b] = std::sqrt(nn);
        if (!(norm[b] > 0.0)) throw InvalidArgument("nmpe: ground truth has zero norm");
        const double* er = est.plane(b, 0);
        const double* ei = est.plane(b, 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::sqrt(er[i] * er[i] + ei[i] * ei[i] + kMagnitudeEps);
            const double d = m - std::hypot(tr[i], ti[i]);
            acc += d * d;
        }
        loss += acc / static_cast<double>(n) / norm[b];
    }
    loss /= static_cast<double>(s.b);

    Tensor out(Shape{1, 1, 1, 1}, loss);
    const Var self = nodes_.size();
    return push(std::move(out), needs(xhat), [=](Tape& t) {
        const double go = t.nodes_[self].grad.data[0];
        const Tensor& e = t.value(xhat);
        Tensor& gx = t.g(xhat);
        for (std::size_t b = 0; b < s.b; ++b) {
            const double f = 2.0 * go / (static_cast<double>(s.b) * static_cast<double>(n) * norm[b]);
            const double* tr = truth.plane(b, 0);
            const double* ti = truth.plane(b, 1);
            const double* er = e.plane(b, 0);
            const double* ei = e.plane(b, 1);
            double* gr = gx.plane(b, 0);
            double* gi = gx.plane(b, 1);
            for (std::size_t i = 0; i < n; ++i) {
                const double m = std::sqrt(er[i] * er[i] + ei[i] * ei[i] + kMagnitudeEps);
                const double d = f * (m - std::hypot(tr[i], ti[i])) / m;
                gr[i] += d * er[i];
                gi[i] += d * ei[i];
            }
        }
    });
}

Var Tape::weighted_sum(Var x, Tensor w) {
    if (!(value(x).shape == w.shape)) throw ShapeError("weighted_sum: " + value(x).shape.str() + " vs " + w.shape.str());
    double acc = 0.0;
    const auto& xv = value(x).data;
    for (std::size_t i = 0; i < xv.size(); ++i) acc += w.data[i] * xv[i];
    const Var self = nodes_.size();
    return push(Tensor(Shape{1, 1, 1, 1}, acc), needs(x), [=, w = std::move(w)](Tape& t) {
        const double go = t.nodes_[self].grad.data[0];
        auto& gx = t.g(x).data;
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go * w.data[i];
    });
}

std::vector<double> Tape::backward(Var root, double seed, std::size_t num_params) {
    if (consumed_) throw UsageError("tape: backward already replayed; run a new forward");
    if (root >= nodes_.size()) throw UsageError("tape: unknown root");
    consumed_ = true;
    std::vector<double> out(num_params, 0.0);
    if (!nodes_[root].needs_grad) return out;

    Tensor& gr = g(root);
    for (double& v : gr.data) v = seed;
    for (std::size_t i = root + 1; i-- > 0;) {
        auto& n = nodes_[i];
        if (!n.needs_grad || n.grad.data.empty()) continue;
        if (n.back) n.back(*this);
    }
    for (const auto& n : nodes_) {
        if (n.offset < 0) continue;
        const auto off = static_cast<std::size_t>(n.offset);
        if (off + n.value.data.size() > num_params) throw UsageError("tape: parameter offset outside gradient");
        const Tensor& gv = n.grad.data.empty() ? Tensor(n.value.shape) : n.grad;
        for (std::size_t j = 0; j < gv.data.size(); ++j) out[off + j] += gv.data[j];
    }
    return out;
}

Tensor Tape::grad(Var v) const {
    const auto& n = nodes_.at(v);
    return n.grad.data.empty() ? Tensor(n.value.shape) : n.grad;
}

}  // namespace arsar::net
