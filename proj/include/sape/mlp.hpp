#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sape/matrix.hpp"

namespace sape::nn {

enum class OutputActivation { linear, sigmoid };

std::string to_string(OutputActivation a);
OutputActivation output_activation_from_string(const std::string& s);

struct DenseLayer {
    Matrix weight;             // out x in
    std::vector<double> bias;  // out

    std::size_t in_dim() const { return weight.cols; }
    std::size_t out_dim() const { return weight.rows; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward ReLU network: `depth` hidden layers of `hidden_width`
/// units followed by a linear layer and the output activation.
struct MlpParams {
    std::vector<DenseLayer> layers;
    std::size_t hidden_width = 0;
    std::size_t depth = 0;
    std::size_t output_dim = 0;
    OutputActivation output_activation = OutputActivation::linear;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t parameter_count() const;
    bool all_finite() const;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Gradients and optimizer moments share the parameter layout.
using LayerSet = std::vector<DenseLayer>;

LayerSet zeros_like(const MlpParams& params);

/// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), drawn layer by
/// layer (weights row-major, then biases) from mt19937_64(seed).
MlpParams init_params(int in_dim, int hidden_width, int depth, int out_dim, std::uint64_t seed,
                      OutputActivation output_activation = OutputActivation::linear);

struct ForwardCache {
    Matrix input;                    // batch x in
    std::vector<Matrix> pre;         // per layer: batch x out (before activation)
    std::vector<Matrix> post;        // per layer: batch x out (after activation)

    const Matrix& output() const { return post.back(); }
};

/// Throws std::invalid_argument if the input width does not match the first layer.
ForwardCache mlp_forward(const MlpParams& params, const Matrix& inputs);

/// Exact gradients of the batch loss w.r.t. every weight and bias, given
/// d loss / d output (post-activation). ReLU uses subgradient 0 at 0.
/// Throws std::logic_error when the cache does not belong to `params`.
LayerSet mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& d_output);

/// Flat little-endian float64 checkpoint with a JSON shape header.
void save_params(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_params(const std::filesystem::path& path);

} // namespace sape::nn
