#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sape/fixtures.hpp"
#include "sape/geometry.hpp"
#include "sape/image_io.hpp"
#include "sape/trainer.hpp"

namespace sape::tasks {

// ---- images ---------------------------------------------------------------

/// Coordinates of every pixel, row-major from the top row. Pixel (x, y) maps
/// to (linspace(-1,1,W)[x], linspace(-1,1,H)[H-1-y]).
Matrix pixel_coords(std::size_t width, std::size_t height);

/// Row-major pixel indices with even x and even y: a regular quarter of the image.
std::vector<std::size_t> training_pixels(std::size_t width, std::size_t height);

/// Trains on the regular quarter of pixels. Metrics: "psnr" over the whole
/// image, "psnr_train", "psnr_heldout".
TrainResult fit_image(const TrainConfig& cfg, const io::Image& image, const TrainOptions& options = {});
std::vector<metrics::MetricResult> evaluate_image(const Model& model, const io::Image& image);
io::Image render_image(const Model& model, std::size_t width, std::size_t height, std::size_t channels);

// ---- 1D signals -----------------------------------------------------------

/// Metrics: "mse_dense", "mse_left", "mse_right" on the evaluation samples
/// (split at signal.split), "mse_train".
TrainResult fit_signal_1d(const TrainConfig& cfg, const fixtures::Signal1D& signal, const TrainOptions& options = {});
std::vector<metrics::MetricResult> evaluate_signal(const Model& model, const fixtures::Signal1D& signal);

// ---- silhouettes ----------------------------------------------------------

/// p_k = k / n for k < n.
Matrix curve_parameters(std::size_t n);

/// Raster domain for silhouette IoU.
Domain silhouette_raster_domain();

/// Symmetric Chamfer loss of curve outputs against fixed target points.
/// Per-sample feedback is each output point's distance to its nearest target.
LossEval chamfer_loss(const Matrix& outputs, const Matrix& targets);

/// Phase 1 fits p -> (cos 2 pi p, sin 2 pi p) with the mask held at its
/// initial state until the MSE drops below cfg.calibration_mse (or
/// cfg.calibration_iterations pass). Phase 2 deforms the curve towards the
/// target with the symmetric Chamfer loss for cfg.iterations.
/// Metrics: "iou", "chamfer". Calibration details land in report.extra.
TrainResult fit_silhouette(const TrainConfig& cfg, const Matrix& target_polygon, const TrainOptions& options = {});
std::vector<metrics::MetricResult> evaluate_silhouette(const Model& model, const TrainConfig& cfg,
                                                       const Matrix& target_polygon);

// ---- occupancy ------------------------------------------------------------

struct OccupancySamples {
    Matrix coords;
    Matrix labels;  // 1 inside, 0 outside
};

/// Three equal groups: uniform over [-1,1]^d, surface + N(0, 0.1^2),
/// surface + N(0, 0.01^2).
OccupancySamples sample_occupancy_training(const geom::Shape& shape, std::size_t per_group, std::uint64_t seed);

inline constexpr double kNearSurfaceEvalNoise = 0.01;
inline constexpr double kFarFieldDistance = 0.05;

/// Metrics: "iou" (mean of the two below), "iou_uniform", "iou_near",
/// "far_field_fp_rate" (predicted-inside fraction of uniform samples more
/// than kFarFieldDistance outside the shape).
TrainResult fit_occupancy(const TrainConfig& cfg, const geom::Shape& shape, const TrainOptions& options = {});
std::vector<metrics::MetricResult> evaluate_occupancy(const Model& model, const TrainConfig& cfg,
                                                      const geom::Shape& shape);

// ---- sweeps ---------------------------------------------------------------

/// "none", "ff", "rbf", prefixed with "sape+" when the mask is enabled.
std::string method_label(const TrainConfig& cfg);

struct SweepEntry {
    std::string method;
    double value = 0.0;
    TrainReport report;
};

using RunFn = std::function<TrainResult(const TrainConfig&)>;

/// Static and SAPE runs of the base encoding at every sigma.
std::vector<SweepEntry> sweep_sigma(const TrainConfig& base, std::span<const double> sigmas, const RunFn& run);

/// SAPE runs at every grid resolution (applied to all axes).
std::vector<SweepEntry> sweep_grid(const TrainConfig& base, std::span<const std::size_t> resolutions, const RunFn& run);

nlohmann::json sweep_to_json(const std::vector<SweepEntry>& entries);

} // namespace sape::tasks
