#include "arsar/net/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "arsar/error.hpp"
#include "arsar/net/arsar_net.hpp"

namespace arsar::net {

namespace {

struct Eval {
    double loss;
    std::vector<std::uint8_t> pattern;
};

class Objective {
public:
    Objective(const OperatorContext& ctx, const NetParams& params, const std::vector<TrainingPair>& batch)
        : ctx_(ctx), params_(params) {
        for (const auto& d : batch) {
            yd_.push_back(d.yd);
            truth_.push_back(d.truth);
        }
    }

    NetParams& params() { return params_; }

    Eval eval() {
        ForwardPass pass = forward_batch(ctx_, params_, yd_, ForwardMode{true, false});
        const double loss = attach_nmpe(pass, truth_);
        return {loss, pass.tape.relu_pattern()};
    }

    std::pair<double, std::vector<double>> gradient() {
        ForwardPass pass = forward_batch(ctx_, params_, yd_, ForwardMode{true, false});
        const double loss = attach_nmpe(pass, truth_);
        return {loss, backward(pass, 1.0)};
    }

    Eval at(std::size_t k, double delta) {
        const double saved = params_.values[k];
        params_.values[k] = saved + delta;
        Eval e = eval();
        params_.values[k] = saved;
        return e;
    }

private:
    const OperatorContext& ctx_;
    NetParams params_;
    std::vector<ComplexImage> yd_;
    std::vector<ComplexImage> truth_;
};

}  // namespace

GradcheckReport gradcheck(const OperatorContext& ctx, const NetParams& params, const std::vector<TrainingPair>& batch,
                          const GradcheckOptions& opt) {
    if (batch.empty()) throw InvalidArgument("gradcheck: empty batch");
    if (!(opt.step > 0.0) || !(opt.tol > 0.0) || !(opt.floor > 0.0)) {
        throw InvalidArgument("gradcheck: step, tol and floor must be positive");
    }
    Objective obj(ctx, params, batch);
    const Eval base = obj.eval();
    auto [loss, grad] = obj.gradient();
    if (opt.inject_sign_flip) {
        for (double& g : grad) g = -g;
    }

    GradcheckReport rep;
    rep.loss = loss;
    for (const auto& spec : params.plan.tensors) {
        TensorCheck tc;
        tc.name = spec.name;
        tc.entries = spec.size();
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const std::size_t k = spec.offset + j;
            double h = opt.step;
            bool resolved = false;
            double fd = 0.0;
            bool retried = false;
            for (int attempt = 0; attempt < 3 && !resolved; ++attempt, h *= 0.1) {
                const Eval plus = obj.at(k, h);
                const Eval minus = obj.at(k, -h);
                const bool pk = plus.pattern != base.pattern;
                const bool mk = minus.pattern != base.pattern;
                if (!pk && !mk) {
                    fd = (plus.loss - minus.loss) / (2.0 * h);
                    resolved = true;
                } else if (attempt == 2 && !(pk && mk)) {
                    fd = pk ? (base.loss - minus.loss) / h : (plus.loss - base.loss) / h;
                    resolved = true;
                }
                if (!resolved) retried = true;
            }
            if (retried) ++tc.kink_retries;
            if (!resolved) {
                ++tc.kink_skipped;
                continue;
            }
            const double err = std::abs(grad[k] - fd) / std::max(std::abs(fd), opt.floor);
            if (err > tc.max_rel_error || !std::isfinite(err)) {
                tc.max_rel_error = std::isfinite(err) ? err : HUGE_VAL;
                tc.worst_entry = j;
            }
        }
        rep.max_rel_error = std::max(rep.max_rel_error, tc.max_rel_error);
        rep.entries += tc.entries;
        rep.kink_skipped += tc.kink_skipped;
        rep.tensors.push_back(std::move(tc));
    }
    rep.passed = rep.max_rel_error <= opt.tol;
    return rep;
}

}  // namespace arsar::net
