#include "sape/adam.hpp"

#include <array>
#include <cmath>

namespace sape::nn {

AdamState make_adam(const MlpParams& params, AdamConfig config)
{
    AdamState s;
    s.first_moment = zeros_like(params);
    s.second_moment = zeros_like(params);
    s.config = config;
    return s;
}

namespace {

void check_finite(const LayerSet& grads, std::int64_t iteration)
{
    for (const auto& l : grads) {
        for (double g : l.weight.data)
            if (!std::isfinite(g))
                throw TrainingDiverged(iteration, "non-finite gradient");
        for (double g : l.bias)
            if (!std::isfinite(g))
                throw TrainingDiverged(iteration, "non-finite gradient");
    }
}

void update(std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
            std::vector<double>& v, const AdamConfig& c, double bc1, double bc2)
{
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        theta[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

} // namespace

void adam_step(MlpParams& params, const LayerSet& grads, AdamState& state, std::int64_t iteration)
{
    const std::size_t nl = params.layers.size();
    if (grads.size() != nl || state.first_moment.size() != nl || state.second_moment.size() != nl)
        throw std::invalid_argument("adam_step: layer count mismatch");
    for (std::size_t k = 0; k < nl; ++k) {
        const auto& p = params.layers[k];
        for (const DenseLayer* other : std::array<const DenseLayer*, 3>{&grads[k], &state.first_moment[k], &state.second_moment[k]})
            if (!other->weight.same_shape(p.weight) || other->bias.size() != p.bias.size())
                throw std::invalid_argument("adam_step: shape mismatch in layer " + std::to_string(k));
    }
    check_finite(grads, iteration);

    state.step_count += 1;
    const auto& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
    for (std::size_t k = 0; k < nl; ++k) {
        update(params.layers[k].weight.data, grads[k].weight.data, state.first_moment[k].weight.data,
               state.second_moment[k].weight.data, c, bc1, bc2);
        update(params.layers[k].bias, grads[k].bias, state.first_moment[k].bias, state.second_moment[k].bias, c,
               bc1, bc2);
    }
}

} // namespace sape::nn
