#include "arsar/net/regularizer.hpp"

#include "arsar/error.hpp"

namespace arsar::net {

BlockVars bind_block(Tape& tape, NetParams& params, std::size_t block) {
    const auto& plan = params.plan;
    if (block >= plan.blocks) throw InvalidArgument("bind_block: block " + std::to_string(block) + " out of range");
    const auto layout = regularizer_layout(params.config);
    BlockVars v;
    v.weight.resize(layout.size());
    v.bias.resize(layout.size());
    v.gamma.resize(layout.size());
    v.beta.resize(layout.size());
    v.buffers.resize(layout.size());

    std::size_t ti = 3 + block * plan.tensors_per_block;
    std::size_t bi = block * plan.buffers_per_block;
    auto leaf = [&]() {
        const auto& s = plan.tensors.at(ti++);
        return tape.parameter(params.tensor(s), s.offset);
    };
    for (std::size_t i = 0; i < layout.size(); ++i) {
        v.weight[i] = leaf();
        v.bias[i] = leaf();
        if (layout[i].norm) {
            v.gamma[i] = leaf();
            v.beta[i] = leaf();
            const auto& b = plan.buffers.at(bi++);
            v.buffers[i] = {params.buffers.data() + b.offset, params.buffers.data() + b.offset + b.channels};
        }
    }
    return v;
}

namespace {

struct Builder {
    Tape& tape;
    const NetConfig& cfg;
    const std::vector<ConvDecl>& layout;
    const BlockVars& vars;
    ForwardMode mode;
    std::vector<Shape>* trace;

    void note(Var v) const {
        if (trace) trace->push_back(tape.value(v).shape);
    }

    Var conv(std::size_t i, Var x) const {
        const auto& d = layout[i];
        return tape.conv2d(x, vars.weight[i], vars.bias[i], d.stride, d.kernel / 2);
    }

    Var norm(std::size_t i, Var x) const {
        return tape.normalize(x, vars.gamma[i], vars.beta[i], cfg.norm, mode.training, vars.buffers[i],
                              mode.update_buffers);
    }
};

Var swift(const Builder& b, Var input) {
    const std::size_t levels = b.cfg.pyramid_levels;
    std::size_t i = 0;
    Var cur = b.tape.relu(b.conv(i++, input));
    b.note(cur);
    std::vector<Var> feats{cur};
    for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t down = i++;
        cur = b.tape.relu(b.norm(down, b.conv(down, cur)));
        b.note(cur);
        cur = b.conv(i++, cur);
        b.note(cur);
        feats.push_back(cur);
    }
    // feats[l + 1] has the channels of level l doubled at the resolution of
    // level l + 1; fuse it back onto feats[l].
    for (std::size_t l = levels; l-- > 0;) {
        const Shape& s = b.tape.value(feats[l]).shape;
        const Var up = b.tape.resize(cur, s.h, s.w);
        cur = b.tape.relu(b.conv(i++, b.tape.concat(feats[l], up)));
        b.note(cur);
    }
    cur = b.conv(i++, cur);
    b.note(cur);
    return cur;
}

Var pro(const Builder& b, Var input) {
    std::size_t i = 0;
    Var cur = b.tape.relu(b.conv(i++, input));
    b.note(cur);
    for (std::size_t p = 0; p < 2 * b.cfg.pair_count; ++p) {
        cur = b.tape.relu(b.conv(i++, cur));
        b.note(cur);
    }
    cur = b.conv(i++, cur);
    b.note(cur);
    cur = b.tape.add(input, cur);
    b.note(cur);
    return cur;
}

}  // namespace

Var regularizer_graph(Tape& tape, const NetConfig& cfg, const BlockVars& vars, Var input, ForwardMode mode,
                      std::vector<Shape>* trace) {
    const Shape s = tape.value(input).shape;
    if (s.c != 2) throw ShapeError("regularizer: expected 2 channels, got " + s.str());
    if (cfg.variant == Variant::swift) {
        const std::size_t f = std::size_t{1} << cfg.pyramid_levels;
        if (s.h % f != 0 || s.w % f != 0) {
            throw ShapeError("regularizer_swift: " + s.str() + " not divisible by " + std::to_string(f));
        }
    }
    const auto layout = regularizer_layout(cfg);
    if (vars.weight.size() != layout.size()) throw ShapeError("regularizer: block does not match layout");
    const Builder b{tape, cfg, layout, vars, mode, trace};
    b.note(input);
    return cfg.variant == Variant::swift ? swift(b, input) : pro(b, input);
}

namespace {

ComplexImage run_single(const NetParams& params, Variant expected, std::size_t block, const ComplexImage& w,
                        std::vector<Shape>* trace) {
    if (params.config.variant != expected) {
        throw InvalidArgument(std::string("parameters are for the ") + to_string(params.config.variant) + " variant");
    }
    NetParams local = params;  // running buffers are bound mutably
    Tape tape;
    const BlockVars vars = bind_block(tape, local, block);
    const Var in = tape.constant(split_complex(w));
    const Var out = regularizer_graph(tape, local.config, vars, in, ForwardMode{}, trace);
    return merge_complex(tape.value(out));
}

}  // namespace

ComplexImage regularizer_swift(const NetParams& params, std::size_t block, const ComplexImage& w,
                               std::vector<Shape>* trace) {
    return run_single(params, Variant::swift, block, w, trace);
}

ComplexImage regularizer_pro(const NetParams& params, std::size_t block, const ComplexImage& w,
                             std::vector<Shape>* trace) {
    return run_single(params, Variant::pro, block, w, trace);
}

}  // namespace arsar::net
