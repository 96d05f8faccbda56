#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sape/mlp.hpp"

namespace sape::nn {

/// Raised when a non-finite value shows up during training.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(std::int64_t iteration, const std::string& what)
        : std::runtime_error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}

    std::int64_t iteration() const { return iteration_; }

private:
    std::int64_t iteration_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    LayerSet first_moment;
    LayerSet second_moment;
    std::int64_t step_count = 0;
    AdamConfig config;
};

AdamState make_adam(const MlpParams& params, AdamConfig config = {});

/// One bias-corrected Adam update in place. `iteration` is only used in the
/// error message when a gradient is NaN/Inf.
void adam_step(MlpParams& params, const LayerSet& grads, AdamState& state, std::int64_t iteration = -1);

} // namespace sape::nn
