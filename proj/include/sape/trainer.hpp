#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sape/config.hpp"
#include "sape/encoding.hpp"
#include "sape/mask.hpp"
#include "sape/metrics.hpp"
#include "sape/mlp.hpp"

namespace sape::tasks {

/// Encoder + mask grid + network: the fitted implicit function.
struct Model {
    enc::EncodingBasis basis;
    nn::MlpParams params;
    mask::MaskGrid grid;
    mask::MaskSchedule schedule;
    bool masked = true;  // false: alpha == 1 everywhere (static encoding)

    /// alpha(p) * E(p) for every row of `coords`.
    Matrix masked_features(const Matrix& coords) const;
    /// Network output for every row of `coords` (evaluated in chunks).
    Matrix predict(const Matrix& coords) const;
};

struct LossEval {
    double loss = 0.0;
    std::vector<double> per_sample;  // feeds the mask grid, one per batch row
    Matrix grad;                     // d loss / d outputs, batch x out
};

using LossFn = std::function<LossEval(const Matrix& outputs, std::span<const std::size_t> ids)>;

struct TrainingProblem {
    Matrix coords;  // every sample the loop may draw, N x d
    Domain domain;
    std::size_t output_dim = 1;
    nn::OutputActivation activation = nn::OutputActivation::linear;
    LossFn loss;
};

/// Per-sample squared error averaged over channels; batch loss is the mean.
LossEval mse_loss(const Matrix& outputs, const Matrix& targets, std::span<const std::size_t> ids);

TrainingProblem regression_problem(Matrix coords, Matrix targets, Domain domain, nn::OutputActivation activation);

struct TrainReport {
    std::vector<double> loss_trace;
    std::vector<metrics::MetricResult> metrics;
    double wall_time_s = 0.0;
    nlohmann::json config;
    std::vector<double> heatmap;
    std::vector<std::size_t> heatmap_shape;
    nlohmann::json extra = nlohmann::json::object();

    const metrics::MetricResult* find(const std::string& name) const;
    double metric(const std::string& name) const;  // throws if absent
};

nlohmann::json report_to_json(const TrainReport& r);

struct TrainResult {
    Model model;
    TrainReport report;
};

/// Called after every iteration (mask feedback included) with the 0-based
/// iteration index.
using TrainObserver = std::function<void(std::size_t iteration, const Model& model)>;

struct TrainOptions {
    std::optional<nn::MlpParams> initial_params;
    std::optional<enc::EncodingBasis> basis;
    bool freeze_mask = false;                // keep clocks fixed (calibration)
    std::size_t iterations = 0;              // 0: config.iterations
    double stop_below = -1.0;                // stop once the batch loss is below this
    std::vector<std::size_t> default_grid;   // used when the config names none
    TrainObserver observer;
};

enc::EncodingBasis make_basis(const TrainConfig& cfg, const Domain& domain);

/// Runs the optimisation loop:
///   features(p) = alpha(t, p) * E(p)      (alpha == 1 when SAPE is off)
///   forward -> per-sample loss -> scatter onto the mask grid
///   backward -> Adam -> every feedback_interval iterations advance the grid.
/// Deterministic for a given config and problem. Throws nn::TrainingDiverged
/// on a non-finite loss or gradient.
TrainResult train(const TrainConfig& cfg, const TrainingProblem& problem, const TrainOptions& options = {});

} // namespace sape::tasks
