#include "arsar/net/train.hpp"

#include <cmath>
#include <numeric>

#include "arsar/error.hpp"
#include "arsar/net/arsar_net.hpp"

namespace arsar::net {

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (batch < 1) throw InvalidArgument("batch must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("lr must be finite and >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw InvalidArgument("Adam betas must be in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw InvalidArgument("adam_eps must be > 0");
}

TrainResult train(const OperatorContext& ctx, NetParams init, const std::vector<TrainingPair>& data,
                  const TrainConfig& tc, const Rng& rng, const StepCallback& on_step) {
    tc.validate();
    if (data.empty()) throw InvalidArgument("train: empty dataset");
    for (const auto& d : data) {
        if (d.yd.rows() != data[0].yd.rows() || d.yd.cols() != data[0].yd.cols() ||
            d.truth.rows() != ctx.rows() || d.truth.cols() != ctx.cols()) {
            throw ShapeError("train: samples do not share one grid");
        }
    }

    TrainResult res;
    res.params = std::move(init);
    NetParams& p = res.params;
    const std::size_t n = p.values.size();
    std::vector<double> m(n, 0.0), v(n, 0.0);
    double b1t = 1.0, b2t = 1.0;

    std::vector<std::size_t> order(data.size());
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle = rng.split(epoch);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle.uniform_index(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += tc.batch) {
            if (tc.max_steps != 0 && step >= tc.max_steps) return res;
            const std::size_t end = std::min(order.size(), start + tc.batch);
            std::vector<ComplexImage> yd, truth;
            for (std::size_t j = start; j < end; ++j) {
                yd.push_back(data[order[j]].yd);
                truth.push_back(data[order[j]].truth);
            }

            double loss = 0.0;
            std::vector<double> grad;
            try {
                ForwardPass pass = forward_batch(ctx, p, yd, ForwardMode{true, true});
                loss = attach_nmpe(pass, truth);
                if (!std::isfinite(loss)) throw TrainingDiverged(step, "non-finite loss");
                grad = backward(pass, 1.0);
            } catch (const TrainingDiverged&) {
                throw;
            } catch (const NumericError& e) {
                throw TrainingDiverged(step, e.what());
            }

            b1t *= tc.beta1;
            b2t *= tc.beta2;
            for (std::size_t k = 0; k < n; ++k) {
                m[k] = tc.beta1 * m[k] + (1.0 - tc.beta1) * grad[k];
                v[k] = tc.beta2 * v[k] + (1.0 - tc.beta2) * grad[k] * grad[k];
                const double mh = m[k] / (1.0 - b1t);
                const double vh = v[k] / (1.0 - b2t);
                p.values[k] -= tc.lr * mh / (std::sqrt(vh) + tc.adam_eps);
            }
            if (!p.all_finite()) throw TrainingDiverged(step, "non-finite parameters");
            res.loss_history.push_back(loss);
            if (on_step) on_step(step, loss);
            ++step;
        }
    }
    return res;
}

double mean_nmpe(const OperatorContext& ctx, const NetParams& params, const std::vector<TrainingPair>& data) {
    if (data.empty()) throw InvalidArgument("mean_nmpe: empty dataset");
    NetParams local = params;
    double acc = 0.0;
    for (const auto& d : data) {
        auto [out, pass] = forward(ctx, local.config, local, d.yd);
        acc += nmpe_loss(out, d.truth);
    }
    return acc / static_cast<double>(data.size());
}

}  // namespace arsar::net
