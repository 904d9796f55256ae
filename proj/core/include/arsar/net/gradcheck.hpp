#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arsar/csa.hpp"
#include "arsar/net/params.hpp"
#include "arsar/net/train.hpp"

namespace arsar::net {

struct GradcheckOptions {
    double step = 1e-5;
    double tol = 1e-4;
    double floor = 1e-8;  // denominator floor of the relative error
    /// Flips the sign of the analytic gradient; used to prove the check fails.
    bool inject_sign_flip = false;
};

struct TensorCheck {
    std::string name;
    std::size_t entries = 0;
    double max_rel_error = 0.0;
    std::size_t worst_entry = 0;
    std::size_t kink_retries = 0;  // entries re-measured with a smaller or one-sided step
    std::size_t kink_skipped = 0;  // entries sitting on a rectifier kink from both sides
};

struct GradcheckReport {
    std::vector<TensorCheck> tensors;
    double max_rel_error = 0.0;
    std::size_t entries = 0;
    std::size_t kink_skipped = 0;
    double loss = 0.0;
    bool passed = false;
};

/// Compares backward() against central differences of the batch NMPE for
/// every parameter entry. Normalization runs on batch statistics without
/// touching the running buffers, so the loss is a smooth function of the
/// parameters away from rectifier kinks. When a perturbation flips a
/// rectifier, the step shrinks tenfold (twice), then falls back to a
/// one-sided difference on the side without a flip.
GradcheckReport gradcheck(const OperatorContext& ctx, const NetParams& params, const std::vector<TrainingPair>& batch,
                          const GradcheckOptions& opt = {});

}  // namespace arsar::net
