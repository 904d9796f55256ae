#include "arsar/net/arsar_net.hpp"

#include <cmath>
#include <string>

#include "arsar/error.hpp"

namespace arsar::net {

namespace {

struct Scalars {
    Var rho, mu, eta;
};

Scalars bind_scalars(Tape& tape, const NetParams& p) {
    const auto& t = p.plan.tensors;
    return {tape.parameter(p.tensor(t[kRhoIndex]), t[kRhoIndex].offset),
            tape.parameter(p.tensor(t[kMuIndex]), t[kMuIndex].offset),
            tape.parameter(p.tensor(t[kEtaIndex]), t[kEtaIndex].offset)};
}

// X + rho (Z - V - X) + mu T(Yd - G X)
Var record_recon(Tape& tape, const OperatorContext& ctx, const Scalars& s, Var x, Var z, Var v, Var yd) {
    const Var residual = tape.sub(yd, tape.observe(x, ctx));
    const Var back = tape.image(residual, ctx);
    const Var pull = tape.sub(tape.sub(z, v), x);
    return tape.add(tape.add(x, tape.scale(s.rho, pull)), tape.scale(s.mu, back));
}

Var record_multiplier(Tape& tape, const Scalars& s, Var x, Var z, Var v) {
    return tape.add(v, tape.scale(s.eta, tape.sub(x, z)));
}

void check_finite(const Tensor& t, std::size_t layer) {
    for (double d : t.data) {
        if (!std::isfinite(d)) throw NumericError("layer " + std::to_string(layer) + ": non-finite activation");
    }
}

}  // namespace

ForwardPass forward_batch(const OperatorContext& ctx, NetParams& params, const std::vector<ComplexImage>& yd,
                          ForwardMode mode) {
    const NetConfig& cfg = params.config;
    if (cfg.height != ctx.rows() || cfg.width != ctx.cols()) {
        throw ShapeError("forward: config grid " + std::to_string(cfg.height) + "x" + std::to_string(cfg.width) +
                         " != operator grid " + std::to_string(ctx.rows()) + "x" + std::to_string(ctx.cols()));
    }
    if (params.values.size() != params.plan.num_params) throw ShapeError("forward: parameter vector size mismatch");

    ForwardPass pass;
    pass.num_params = params.plan.num_params;
    pass.batch = yd.size();
    Tape& tape = pass.tape;

    const Scalars s = bind_scalars(tape, params);
    std::vector<BlockVars> blocks;
    for (std::size_t k = 0; k < params.plan.blocks; ++k) blocks.push_back(bind_block(tape, params, k));

    const Tensor y = split_batch(yd);
    if (y.shape.h != ctx.down_rows() || y.shape.w != ctx.down_cols()) {
        throw ShapeError("forward: echo " + y.shape.str() + " does not match downsampled grid");
    }
    const Var yv = tape.constant(y);
    Var x = tape.image(yv, ctx);
    Var z = x;
    Var v = tape.constant(Tensor(tape.value(x).shape));

    for (std::size_t k = 0; k < cfg.num_layers; ++k) {
        try {
            x = record_recon(tape, ctx, s, x, z, v, yv);
            const Var w = tape.add(x, v);
            z = regularizer_graph(tape, cfg, blocks[cfg.share_weights ? 0 : k], w, mode);
            v = record_multiplier(tape, s, x, z, v);
            check_finite(tape.value(x), k);
            check_finite(tape.value(z), k);
        } catch (const NumericError& e) {
            if (std::string(e.what()).rfind("layer ", 0) == 0) throw;
            throw NumericError("layer " + std::to_string(k) + ": " + e.what());
        } catch (const ShapeError& e) {
            throw ShapeError("layer " + std::to_string(k) + ": " + e.what());
        }
    }
    pass.output = x;
    return pass;
}

std::pair<ComplexImage, ForwardPass> forward(const OperatorContext& ctx, const NetConfig& cfg, NetParams& params,
                                             const ComplexImage& yd) {
    if (!(cfg == params.config)) throw InvalidArgument("forward: config does not match parameters");
    ForwardPass pass = forward_batch(ctx, params, {yd});
    ComplexImage out = pass.image(0);
    return {std::move(out), std::move(pass)};
}

double attach_nmpe(ForwardPass& pass, const std::vector<ComplexImage>& truth) {
    if (pass.has_loss) throw UsageError("attach_nmpe: loss already attached");
    if (truth.size() != pass.batch) throw ShapeError("attach_nmpe: batch size mismatch");
    pass.loss = pass.tape.nmpe(pass.output, split_batch(truth));
    pass.has_loss = true;
    return pass.tape.value(pass.loss).data[0];
}

std::vector<double> backward(ForwardPass& pass, double seed) {
    if (!pass.has_loss) throw UsageError("backward: no loss attached to this pass");
    return pass.tape.backward(pass.loss, seed, pass.num_params);
}

ComplexImage recon_module(const OperatorContext& ctx, const NetParams& params, const ComplexImage& x,
                          const ComplexImage& z, const ComplexImage& v, const ComplexImage& yd) {
    require_same_shape(x, z, "recon_module");
    require_same_shape(x, v, "recon_module");
    ComplexImage out = x;
    out *= cplx(1.0 - params.rho_t());
    ComplexImage back = imaging_T(ctx, yd - observation_G(ctx, x));
    back *= cplx(params.mu_t());
    out += back;
    ComplexImage pull = z - v;
    pull *= cplx(params.rho_t());
    out += pull;
    return out;
}

ComplexImage multiplier_module(const NetParams& params, const ComplexImage& x, const ComplexImage& z,
                               const ComplexImage& v) {
    require_same_shape(x, z, "multiplier_module");
    require_same_shape(x, v, "multiplier_module");
    ComplexImage d = x - z;
    d *= cplx(params.eta_t());
    return v + d;
}

double nmpe_loss(const ComplexImage& xhat, const ComplexImage& xgt) {
    require_same_shape(xhat, xgt, "nmpe_loss");
    Tape tape;
    const Var e = tape.constant(split_complex(xhat));
    return tape.value(tape.nmpe(e, split_complex(xgt))).data[0];
}

}  // namespace arsar::net
