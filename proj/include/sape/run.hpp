#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sape/tasks.hpp"

// Run directories: everything needed to re-evaluate a fit without retraining.
//
//   config.json     TrainConfig
//   report.json     {config, metrics, loss_trace, wall_time_s, ...}
//   checkpoint.bin  network parameters
//   basis.bin       encoding basis
//   grid.bin        mask grid clocks + schedule
//   reference.bin   the data the metrics are computed against
//   output.*        rendered prediction (png for images, txt for curves/signals, pgm for 2D occupancy)
//   heatmap.pgm     per-node highest exposed Lipschitz key, scaled to the largest key
//   heatmap.bin     the same values as float64
namespace sape::runs {

/// Data a task is fitted to and evaluated against.
struct Reference {
    tasks::Task task = tasks::Task::image2d;
    io::Image image;                         // image2d
    fixtures::Signal1D signal;               // signal1d
    Matrix polygon;                          // silhouette2d and 2D occupancy
    std::optional<geom::TriangleMesh> mesh;  // 3D occupancy

    std::unique_ptr<geom::Shape> shape() const;  // occupancy only
};

/// Resolves cfg.input: "fixture:<name>" or a file (image, point list, OFF/OBJ mesh).
/// An empty input picks the task's default fixture.
Reference load_reference(const tasks::TrainConfig& cfg);

tasks::TrainResult run_task(const tasks::TrainConfig& cfg, const Reference& ref, const tasks::TrainOptions& options = {});
std::vector<metrics::MetricResult> evaluate_task(const tasks::Model& model, const tasks::TrainConfig& cfg,
                                                 const Reference& ref);

/// Writes every artifact listed above into `dir` (created if missing).
void write_run(const std::filesystem::path& dir, const tasks::TrainResult& result, const Reference& ref);

struct LoadedRun {
    tasks::TrainConfig config;
    tasks::Model model;
    Reference reference;
    nlohmann::json report;
};

LoadedRun load_run(const std::filesystem::path& dir);

struct Evaluation {
    std::vector<metrics::MetricResult> recomputed;
    std::vector<metrics::MetricResult> reported;
    bool matches = false;  // every reported value reproduced exactly
};

Evaluation evaluate_run(const std::filesystem::path& dir);

} // namespace sape::runs
