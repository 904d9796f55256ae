#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"
#include "arsar/error.hpp"
#include "arsar/net/params.hpp"
#include "arsar/rng.hpp"

namespace arsar::net {

/// Downsampled echo and its ground-truth scene.
struct TrainingPair {
    ComplexImage yd;
    ComplexImage truth;
};

struct TrainConfig {
    std::size_t epochs = 1;
    double lr = 1e-3;
    std::size_t batch = 4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Stop after this many steps when nonzero.
    std::size_t max_steps = 0;

    void validate() const;
};

/// Non-finite loss during training.
class TrainingDiverged : public NumericError {
public:
    TrainingDiverged(std::size_t step, const std::string& what)
        : NumericError("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

struct TrainResult {
    NetParams params;
    std::vector<double> loss_history;  // one value per step
};

/// Called after each step with (step index, loss).
using StepCallback = std::function<void(std::size_t, double)>;

/// Adam on the batch NMPE. Each epoch visits a fresh permutation of the
/// data drawn from `rng`; the last batch of an epoch may be short.
TrainResult train(const OperatorContext& ctx, NetParams init, const std::vector<TrainingPair>& data,
                  const TrainConfig& tc, const Rng& rng, const StepCallback& on_step = {});

/// Evaluation-mode NMPE averaged over `data`.
double mean_nmpe(const OperatorContext& ctx, const NetParams& params, const std::vector<TrainingPair>& data);

}  // namespace arsar::net
