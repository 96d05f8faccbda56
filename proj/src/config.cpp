#include "sape/config.hpp"

#include <stdexcept>

namespace sape::tasks {

std::string to_string(Task t)
{
    switch (t) {
    case Task::image2d: return "image2d";
    case Task::signal1d: return "signal1d";
    case Task::silhouette2d: return "silhouette2d";
    case Task::occupancy: return "occupancy";
    }
    return "image2d";
}

Task task_from_string(const std::string& s)
{
    if (s == "image2d")
        return Task::image2d;
    if (s == "signal1d")
        return Task::signal1d;
    if (s == "silhouette2d")
        return Task::silhouette2d;
    if (s == "occupancy")
        return Task::occupancy;
    throw std::invalid_argument("unknown task: " + s);
}

TrainConfig default_config(Task task)
{
    TrainConfig c;
    c.task = task;
    switch (task) {
    case Task::image2d:
        c.iterations = 2000;
        c.epsilon = 1e-3;
        c.sigma = 20.0;
        c.hidden_width = 256;
        c.depth = 4;
        break;
    case Task::signal1d:
        c.iterations = 2000;
        c.epsilon = 1e-3;
        c.sigma = 20.0;
        c.hidden_width = 128;
        c.depth = 3;
        c.grid_resolution = {64};
        c.rbf_grid = 64;
        break;
    case Task::silhouette2d:
        c.iterations = 5000;
        c.epsilon = 1e-2;
        c.sigma = 5.0;
        c.hidden_width = 128;
        c.depth = 3;
        c.grid_resolution = {64};
        c.rbf_grid = 64;
        break;
    case Task::occupancy:
        c.iterations = 5000;
        c.epsilon = 1e-2;
        c.sigma = 10.0;
        c.hidden_width = 256;
        c.depth = 4;
        c.batch_size = 4096;
        break;
    }
    return c;
}

void validate(const TrainConfig& c)
{
    if (!(c.epsilon > 0.0))
        throw std::invalid_argument("epsilon must be > 0");
    if (c.iterations < 1)
        throw std::invalid_argument("iterations must be >= 1");
    if (c.encoding == enc::EncodingKind::fourier && !(c.sigma > 0.0))
        throw std::invalid_argument("sigma must be > 0");
    if (c.encoding == enc::EncodingKind::fourier && c.num_frequencies < 1)
        throw std::invalid_argument("num_frequencies must be >= 1");
    if (c.encoding == enc::EncodingKind::rbf_grid && (c.rbf_grid < 2 || c.rbf_tiers < 1 || !(c.rbf_bandwidth_scale > 0.0)))
        throw std::invalid_argument("rbf settings need rbf_grid >= 2, rbf_tiers >= 1 and a positive bandwidth scale");
    if (c.hidden_width < 1 || c.depth < 1)
        throw std::invalid_argument("network width and depth must be >= 1");
    if (!(c.lr > 0.0))
        throw std::invalid_argument("learning rate must be > 0");
    if (c.feedback_interval < 1)
        throw std::invalid_argument("feedback_interval must be >= 1");
    for (auto r : c.grid_resolution)
        if (r < 1)
            throw std::invalid_argument("grid resolution must be >= 1 per axis");
}

std::vector<std::size_t> effective_grid_resolution(const TrainConfig& cfg, std::size_t dim,
                                                   const std::vector<std::size_t>& fallback)
{
    if (!cfg.spatial_enabled)
        return std::vector<std::size_t>(dim, 1);
    const auto& src = cfg.grid_resolution.empty() ? fallback : cfg.grid_resolution;
    if (src.size() == 1)
        return std::vector<std::size_t>(dim, src[0]);
    if (src.size() != dim)
        throw std::invalid_argument("grid resolution needs 1 or " + std::to_string(dim) + " entries");
    return src;
}

void to_json(nlohmann::json& j, const TrainConfig& c)
{
    j = nlohmann::json{
        {"task", to_string(c.task)},
        {"encoding", enc::to_string(c.encoding)},
        {"sape_enabled", c.sape_enabled},
        {"spatial_enabled", c.spatial_enabled},
        {"sigma", c.sigma},
        {"num_frequencies", c.num_frequencies},
        {"rbf_grid", c.rbf_grid},
        {"rbf_tiers", c.rbf_tiers},
        {"rbf_bandwidth_scale", c.rbf_bandwidth_scale},
        {"iterations", c.iterations},
        {"epsilon", c.epsilon},
        {"grid_resolution", c.grid_resolution},
        {"feedback_interval", c.feedback_interval},
        {"batch_size", c.batch_size},
        {"hidden_width", c.hidden_width},
        {"depth", c.depth},
        {"lr", c.lr},
        {"seed", c.seed},
        {"curve_samples", c.curve_samples},
        {"target_samples", c.target_samples},
        {"calibration_iterations", c.calibration_iterations},
        {"calibration_mse", c.calibration_mse},
        {"raster_resolution", c.raster_resolution},
        {"samples_per_group", c.samples_per_group},
        {"eval_samples", c.eval_samples},
        {"input", c.input},
    };
}

void from_json(const nlohmann::json& j, TrainConfig& c)
{
    c = default_config(task_from_string(j.at("task").get<std::string>()));
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key))
            j.at(key).get_to(field);
    };
    if (j.contains("encoding"))
        c.encoding = enc::encoding_kind_from_string(j.at("encoding").get<std::string>());
    opt("sape_enabled", c.sape_enabled);
    opt("spatial_enabled", c.spatial_enabled);
    opt("sigma", c.sigma);
    opt("num_frequencies", c.num_frequencies);
    opt("rbf_grid", c.rbf_grid);
    opt("rbf_tiers", c.rbf_tiers);
    opt("rbf_bandwidth_scale", c.rbf_bandwidth_scale);
    opt("iterations", c.iterations);
    opt("epsilon", c.epsilon);
    opt("grid_resolution", c.grid_resolution);
    opt("feedback_interval", c.feedback_interval);
    opt("batch_size", c.batch_size);
    opt("hidden_width", c.hidden_width);
    opt("depth", c.depth);
    opt("lr", c.lr);
    opt("seed", c.seed);
    opt("curve_samples", c.curve_samples);
    opt("target_samples", c.target_samples);
    opt("calibration_iterations", c.calibration_iterations);
    opt("calibration_mse", c.calibration_mse);
    opt("raster_resolution", c.raster_resolution);
    opt("samples_per_group", c.samples_per_group);
    opt("eval_samples", c.eval_samples);
    opt("input", c.input);
}

std::uint64_t derived_seed(std::uint64_t seed, SeedStream stream)
{
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace sape::tasks
