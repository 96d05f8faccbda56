#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sape/encoding.hpp"

namespace sape::tasks {

enum class Task { image2d, signal1d, silhouette2d, occupancy };

std::string to_string(Task t);
Task task_from_string(const std::string& s);

/// Everything that defines one training run. Defaults come from
/// `default_config(task)`; they are declared settings, not tuned constants.
struct TrainConfig {
    Task task = Task::image2d;
    enc::EncodingKind encoding = enc::EncodingKind::fourier;
    bool sape_enabled = true;
    bool spatial_enabled = true;

    double sigma = 20.0;
    std::size_t num_frequencies = 256;
    std::size_t rbf_grid = 32;          // finest RBF lattice per axis
    std::size_t rbf_tiers = 3;          // lattices rbf_grid, rbf_grid/2, ...
    double rbf_bandwidth_scale = 1.0;   // h = scale * lattice spacing

    std::size_t iterations = 2000;      // T
    double epsilon = 1e-3;
    std::vector<std::size_t> grid_resolution;  // empty: task default
    std::size_t feedback_interval = 1;
    std::size_t batch_size = 0;         // 0: task default

    std::size_t hidden_width = 256;
    std::size_t depth = 4;
    double lr = 1e-3;
    std::uint64_t seed = 0;

    // silhouettes
    std::size_t curve_samples = 512;
    std::size_t target_samples = 1024;
    std::size_t calibration_iterations = 4000;
    double calibration_mse = 1e-4;
    std::size_t raster_resolution = 512;

    // occupancy
    std::size_t samples_per_group = 10000;
    std::size_t eval_samples = 10000;

    std::string input;  // file path or "fixture:<name>"

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

TrainConfig default_config(Task task);

/// Throws std::invalid_argument on inconsistent settings.
void validate(const TrainConfig& cfg);

/// Grid resolution actually used: all ones when spatial adaptivity is off,
/// the configured value otherwise (`fallback` when none was configured).
std::vector<std::size_t> effective_grid_resolution(const TrainConfig& cfg, std::size_t dim,
                                                   const std::vector<std::size_t>& fallback);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Independent RNG streams derived from the run seed.
enum class SeedStream : std::uint64_t { basis = 1, params = 2, batches = 3, data = 4, eval = 5 };
std::uint64_t derived_seed(std::uint64_t seed, SeedStream stream);

} // namespace sape::tasks
