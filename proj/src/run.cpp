#include "sape/run.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "sape/blob.hpp"
#include "sape/mesh_io.hpp"

namespace sape::runs {

namespace fs = std::filesystem;
using tasks::Task;

namespace {

constexpr std::size_t kOccupancyRender = 256;

std::string default_fixture(Task task)
{
    switch (task) {
    case Task::image2d: return "two-tone";
    case Task::signal1d: return "piecewise";
    case Task::silhouette2d: return "square";
    case Task::occupancy: return "gear";
    }
    return "";
}

fixtures::Signal1D signal_from_points(const Matrix& pts)
{
    if (pts.cols != 2 || pts.rows < 2)
        throw std::invalid_argument("signal input needs at least two 'x y' rows");
    fixtures::Signal1D s;
    s.train_x = Matrix(pts.rows, 1);
    s.train_y = Matrix(pts.rows, 1);
    for (std::size_t i = 0; i < pts.rows; ++i) {
        s.train_x(i, 0) = pts(i, 0);
        s.train_y(i, 0) = pts(i, 1);
    }
    // a sampled file has no denser ground truth: evaluate on the samples themselves
    s.eval_x = s.train_x;
    s.eval_y = s.train_y;
    return s;
}

bool is_mesh_file(const fs::path& p)
{
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".off" || ext == ".obj";
}

void write_json(const fs::path& path, const nlohmann::json& j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(io::read_file(path)); }

void save_reference(const Reference& ref, const fs::path& path)
{
    nlohmann::json h{{"format", "sape-reference"}, {"task", tasks::to_string(ref.task)}};
    std::vector<double> payload;
    auto append = [&](const Matrix& m) { payload.insert(payload.end(), m.data.begin(), m.data.end()); };
    switch (ref.task) {
    case Task::image2d:
        h["kind"] = "image";
        h["shape"] = {ref.image.width, ref.image.height, ref.image.channels};
        payload = ref.image.data;
        break;
    case Task::signal1d:
        h["kind"] = "signal";
        h["train"] = ref.signal.train_x.rows;
        h["eval"] = ref.signal.eval_x.rows;
        h["split"] = ref.signal.split;
        append(ref.signal.train_x);
        append(ref.signal.train_y);
        append(ref.signal.eval_x);
        append(ref.signal.eval_y);
        break;
    case Task::silhouette2d:
    case Task::occupancy:
        if (ref.mesh) {
            h["kind"] = "mesh";
            h["vertices"] = ref.mesh->vertices.rows;
            h["faces"] = ref.mesh->faces;
            append(ref.mesh->vertices);
        } else {
            h["kind"] = "polygon";
            h["vertices"] = ref.polygon.rows;
            append(ref.polygon);
        }
        break;
    }
    io::write_blob(path, h, payload);
}

Reference load_saved_reference(const fs::path& path)
{
    const auto blob = io::read_blob(path);
    const auto& h = blob.header;
    if (h.value("format", "") != "sape-reference")
        throw std::runtime_error(path.string() + ": not a reference file");
    Reference ref;
    ref.task = tasks::task_from_string(h.at("task").get<std::string>());
    const auto kind = h.at("kind").get<std::string>();
    std::size_t offset = 0;
    auto take = [&](std::size_t rows, std::size_t cols) {
        if (offset + rows * cols > blob.payload.size())
            throw std::runtime_error(path.string() + ": truncated payload");
        Matrix m(rows, cols);
        std::copy_n(blob.payload.begin() + static_cast<std::ptrdiff_t>(offset), rows * cols, m.data.begin());
        offset += rows * cols;
        return m;
    };
    if (kind == "image") {
        const auto s = h.at("shape").get<std::vector<std::size_t>>();
        ref.image = io::Image(s.at(0), s.at(1), s.at(2));
        ref.image.data = take(s[0] * s[1], s[2]).data;
    } else if (kind == "signal") {
        const auto nt = h.at("train").get<std::size_t>();
        const auto ne = h.at("eval").get<std::size_t>();
        ref.signal.split = h.at("split").get<double>();
        ref.signal.train_x = take(nt, 1);
        ref.signal.train_y = take(nt, 1);
        ref.signal.eval_x = take(ne, 1);
        ref.signal.eval_y = take(ne, 1);
    } else if (kind == "polygon") {
        ref.polygon = take(h.at("vertices").get<std::size_t>(), 2);
    } else if (kind == "mesh") {
        geom::TriangleMesh mesh;
        mesh.vertices = take(h.at("vertices").get<std::size_t>(), 3);
        mesh.faces = h.at("faces").get<std::vector<std::array<std::size_t, 3>>>();
        ref.mesh = std::move(mesh);
    } else {
        throw std::runtime_error(path.string() + ": unknown reference kind '" + kind + "'");
    }
    return ref;
}

// 2D view of a grid-shaped field: the whole field for d <= 2, the middle
// slice along the last axis for d == 3.
std::vector<double> planar_slice(std::span<const double> values, const std::vector<std::size_t>& res,
                                 std::size_t& width, std::size_t& height)
{
    width = res.at(0);
    height = res.size() > 1 ? res[1] : 1;
    const std::size_t plane = width * height;
    const std::size_t offset = res.size() > 2 ? (res[2] / 2) * plane : 0;
    return {values.begin() + static_cast<std::ptrdiff_t>(offset),
            values.begin() + static_cast<std::ptrdiff_t>(offset + plane)};
}

void write_output(const fs::path& dir, const tasks::TrainResult& r, const Reference& ref)
{
    const auto& cfg = r.report.config.get<tasks::TrainConfig>();
    switch (ref.task) {
    case Task::image2d:
        io::write_image(tasks::render_image(r.model, ref.image.width, ref.image.height, ref.image.channels),
                        dir / "output.png");
        break;
    case Task::signal1d: {
        const auto pred = r.model.predict(ref.signal.eval_x);
        Matrix out(pred.rows, 2);
        for (std::size_t i = 0; i < pred.rows; ++i) {
            out(i, 0) = ref.signal.eval_x(i, 0);
            out(i, 1) = pred(i, 0);
        }
        io::write_points(out, dir / "output.txt");
        break;
    }
    case Task::silhouette2d:
        io::write_points(r.model.predict(tasks::curve_parameters(cfg.curve_samples)), dir / "output.txt");
        break;
    case Task::occupancy: {
        const std::size_t d = r.model.basis.dim;
        const std::size_t n = kOccupancyRender;
        Matrix pts(n * n, d, 0.0);
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t x = 0; x < n; ++x) {
                pts(y * n + x, 0) = -1.0 + 2.0 * (static_cast<double>(x) + 0.5) / static_cast<double>(n);
                pts(y * n + x, 1) = -1.0 + 2.0 * (static_cast<double>(y) + 0.5) / static_cast<double>(n);
            }
        }
        const auto pred = r.model.predict(pts);
        io::write_image(io::scalar_field_image(pred.data, n, n, 0.0, 1.0), dir / "output.pgm");
        break;
    }
    }
}

} // namespace

std::unique_ptr<geom::Shape> Reference::shape() const
{
    if (mesh)
        return std::make_unique<geom::MeshShape>(*mesh);
    return std::make_unique<geom::PolygonShape>(polygon);
}

Reference load_reference(const tasks::TrainConfig& cfg)
{
    Reference ref;
    ref.task = cfg.task;
    const std::string input = cfg.input.empty() ? "fixture:" + default_fixture(cfg.task) : cfg.input;
    const std::string prefix = "fixture:";
    if (input.rfind(prefix, 0) == 0) {
        const std::string name = input.substr(prefix.size());
        switch (cfg.task) {
        case Task::image2d: ref.image = fixtures::image_fixture(name); break;
        case Task::signal1d: ref.signal = fixtures::signal_fixture(name); break;
        case Task::silhouette2d: ref.polygon = fixtures::polygon_fixture(name); break;
        case Task::occupancy:
            if (name == "sphere")
                ref.mesh = geom::icosphere(0.6, 3);
            else if (name == "circle")
                ref.polygon = fixtures::circle_polygon(256, 0.6);
            else
                ref.polygon = fixtures::polygon_fixture(name);
            break;
        }
        return ref;
    }
    const fs::path path = input;
    switch (cfg.task) {
    case Task::image2d: ref.image = io::read_image(path); break;
    case Task::signal1d: ref.signal = signal_from_points(io::read_points(path)); break;
    case Task::silhouette2d: ref.polygon = io::read_points(path); break;
    case Task::occupancy:
        if (is_mesh_file(path))
            ref.mesh = io::read_mesh(path);
        else
            ref.polygon = io::read_points(path);
        break;
    }
    return ref;
}

tasks::TrainResult run_task(const tasks::TrainConfig& cfg, const Reference& ref, const tasks::TrainOptions& options)
{
    if (cfg.task != ref.task)
        throw std::invalid_argument("run_task: config and reference disagree on the task");
    switch (cfg.task) {
    case Task::image2d: return tasks::fit_image(cfg, ref.image, options);
    case Task::signal1d: return tasks::fit_signal_1d(cfg, ref.signal, options);
    case Task::silhouette2d: return tasks::fit_silhouette(cfg, ref.polygon, options);
    case Task::occupancy: return tasks::fit_occupancy(cfg, *ref.shape(), options);
    }
    throw std::invalid_argument("run_task: unknown task");
}

std::vector<metrics::MetricResult> evaluate_task(const tasks::Model& model, const tasks::TrainConfig& cfg,
                                                 const Reference& ref)
{
    switch (cfg.task) {
    case Task::image2d: return tasks::evaluate_image(model, ref.image);
    case Task::signal1d: return tasks::evaluate_signal(model, ref.signal);
    case Task::silhouette2d: return tasks::evaluate_silhouette(model, cfg, ref.polygon);
    case Task::occupancy: return tasks::evaluate_occupancy(model, cfg, *ref.shape());
    }
    throw std::invalid_argument("evaluate_task: unknown task");
}

void write_run(const fs::path& dir, const tasks::TrainResult& result, const Reference& ref)
{
    fs::create_directories(dir);
    write_json(dir / "config.json", result.report.config);
    write_json(dir / "report.json", tasks::report_to_json(result.report));
    nn::save_params(result.model.params, dir / "checkpoint.bin");
    enc::save_basis(result.model.basis, dir / "basis.bin");
    mask::save_grid(result.model.grid, result.model.schedule, dir / "grid.bin");
    save_reference(ref, dir / "reference.bin");
    write_output(dir, result, ref);

    const auto& hm = result.report.heatmap;
    io::write_blob(dir / "heatmap.bin", {{"format", "sape-heatmap"}, {"shape", result.report.heatmap_shape}}, hm);
    std::size_t w = 0, h = 0;
    const auto plane = planar_slice(hm, result.report.heatmap_shape, w, h);
    const auto& keys = result.model.basis.lipschitz_keys;
    const double top = keys.empty() ? 1.0 : std::max(keys.back(), 1e-12);
    io::write_image(io::scalar_field_image(plane, w, h, 0.0, top), dir / "heatmap.pgm");
}

LoadedRun load_run(const fs::path& dir)
{
    LoadedRun run;
    run.config = read_json(dir / "config.json").get<tasks::TrainConfig>();
    run.report = read_json(dir / "report.json");
    run.model.params = nn::load_params(dir / "checkpoint.bin");
    run.model.basis = enc::load_basis(dir / "basis.bin");
    auto g = mask::load_grid(dir / "grid.bin");
    run.model.grid = std::move(g.grid);
    run.model.schedule = g.schedule;
    run.model.masked = run.config.sape_enabled;
    run.reference = load_saved_reference(dir / "reference.bin");
    return run;
}

Evaluation evaluate_run(const fs::path& dir)
{
    const auto run = load_run(dir);
    Evaluation ev;
    ev.recomputed = evaluate_task(run.model, run.config, run.reference);
    for (const auto& m : run.report.at("metrics"))
        ev.reported.push_back({m.at("name").get<std::string>(), m.at("value").get<double>(),
                               m.at("support").get<std::string>()});
    ev.matches = ev.reported.size() == ev.recomputed.size();
    for (std::size_t i = 0; ev.matches && i < ev.reported.size(); ++i)
        ev.matches = ev.reported[i].name == ev.recomputed[i].name && ev.reported[i].value == ev.recomputed[i].value;
    return ev;
}

} // namespace sape::runs
