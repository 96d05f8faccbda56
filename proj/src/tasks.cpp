#include "sape/tasks.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sape/kernels.hpp"
#include "sape/metrics.hpp"

namespace sape::tasks {

namespace {

double linspace_at(std::size_t i, std::size_t n, double lo, double hi)
{
    if (n == 1)
        return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

Matrix image_targets(const io::Image& image, std::span<const std::size_t> pixels)
{
    Matrix t(pixels.size(), image.channels);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        for (std::size_t c = 0; c < image.channels; ++c)
            t(i, c) = image.data[pixels[i] * image.channels + c];
    return t;
}

double region_mse(const Matrix& pred, const Matrix& ref, const std::vector<std::size_t>& rows)
{
    if (rows.empty())
        return 0.0;
    const auto a = gather_rows(pred, rows);
    const auto b = gather_rows(ref, rows);
    return metrics::mse(a.data, b.data);
}

Matrix uniform_points(std::size_t count, std::size_t d, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(count, d);
    for (auto& v : m.data)
        v = u(rng);
    return m;
}

Matrix near_surface_points(const geom::Shape& shape, std::size_t count, double noise, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, noise);
    Matrix m(count, shape.dim());
    for (std::size_t i = 0; i < count; ++i) {
        const auto s = shape.sample_surface(rng);
        for (std::size_t k = 0; k < shape.dim(); ++k)
            m(i, k) = s[k] + n(rng);
    }
    return m;
}

std::vector<std::uint8_t> inside_labels(const geom::Shape& shape, const Matrix& pts)
{
    std::vector<std::uint8_t> out(pts.rows);
    for (std::size_t i = 0; i < pts.rows; ++i)
        out[i] = shape.inside(pts.row(i)) ? 1 : 0;
    return out;
}

std::vector<std::uint8_t> predicted_inside(const Matrix& pred)
{
    std::vector<std::uint8_t> out(pred.rows);
    for (std::size_t i = 0; i < pred.rows; ++i)
        out[i] = pred(i, 0) > 0.5 ? 1 : 0;
    return out;
}

} // namespace

Matrix pixel_coords(std::size_t width, std::size_t height)
{
    Matrix m(width * height, 2);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            m(y * width + x, 0) = linspace_at(x, width, -1.0, 1.0);
            m(y * width + x, 1) = linspace_at(height - 1 - y, height, -1.0, 1.0);
        }
    }
    return m;
}

std::vector<std::size_t> training_pixels(std::size_t width, std::size_t height)
{
    std::vector<std::size_t> ids;
    for (std::size_t y = 0; y < height; y += 2)
        for (std::size_t x = 0; x < width; x += 2)
            ids.push_back(y * width + x);
    return ids;
}

TrainResult fit_image(const TrainConfig& cfg, const io::Image& image, const TrainOptions& options)
{
    if (image.width < 8 || image.height < 8 || image.channels == 0)
        throw std::invalid_argument("fit_image: image must be at least 8x8");
    const auto ids = training_pixels(image.width, image.height);
    auto problem = regression_problem(gather_rows(pixel_coords(image.width, image.height), ids),
                                      image_targets(image, ids), Domain::cube(2, -1.0, 1.0),
                                      nn::OutputActivation::sigmoid);

    TrainConfig c = cfg;
    if (c.batch_size == 0 && image.width * image.height > 64 * 64)
        c.batch_size = 8192;
    TrainOptions opt = options;
    if (opt.default_grid.empty())
        opt.default_grid = {(image.width + 1) / 2, (image.height + 1) / 2};

    auto r = train(c, problem, opt);
    r.report.metrics = evaluate_image(r.model, image);
    return r;
}

io::Image render_image(const Model& model, std::size_t width, std::size_t height, std::size_t channels)
{
    const auto pred = model.predict(pixel_coords(width, height));
    if (pred.cols != channels)
        throw std::invalid_argument("render_image: model output does not match the channel count");
    io::Image img(width, height, channels);
    img.data = pred.data;
    return img;
}

std::vector<metrics::MetricResult> evaluate_image(const Model& model, const io::Image& image)
{
    const auto pred = render_image(model, image.width, image.height, image.channels);
    const auto train_ids = training_pixels(image.width, image.height);
    std::vector<std::uint8_t> is_train(image.width * image.height, 0);
    for (auto i : train_ids)
        is_train[i] = 1;
    std::vector<double> tp, tr, hp, hr;
    for (std::size_t i = 0; i < is_train.size(); ++i) {
        auto& p = is_train[i] ? tp : hp;
        auto& r = is_train[i] ? tr : hr;
        for (std::size_t c = 0; c < image.channels; ++c) {
            p.push_back(pred.data[i * image.channels + c]);
            r.push_back(image.data[i * image.channels + c]);
        }
    }
    std::vector<metrics::MetricResult> out;
    out.push_back({"psnr", metrics::psnr(pred.data, image.data), "entire image"});
    out.push_back({"psnr_train", metrics::psnr(tp, tr), "training pixels"});
    if (!hp.empty())
        out.push_back({"psnr_heldout", metrics::psnr(hp, hr), "held-out pixels"});
    return out;
}

TrainResult fit_signal_1d(const TrainConfig& cfg, const fixtures::Signal1D& signal, const TrainOptions& options)
{
    if (signal.train_x.cols != 1 || signal.train_y.rows != signal.train_x.rows)
        throw std::invalid_argument("fit_signal_1d: expected 1D samples with one target each");
    auto problem = regression_problem(signal.train_x, signal.train_y, Domain::cube(1, 0.0, 1.0),
                                      nn::OutputActivation::linear);
    TrainOptions opt = options;
    if (opt.default_grid.empty())
        opt.default_grid = {64};
    auto r = train(cfg, problem, opt);
    r.report.metrics = evaluate_signal(r.model, signal);
    return r;
}

std::vector<metrics::MetricResult> evaluate_signal(const Model& model, const fixtures::Signal1D& signal)
{
    const auto pred = model.predict(signal.eval_x);
    std::vector<std::size_t> left, right;
    for (std::size_t i = 0; i < signal.eval_x.rows; ++i)
        (signal.eval_x(i, 0) < signal.split ? left : right).push_back(i);
    const auto train_pred = model.predict(signal.train_x);
    return {
        {"mse_dense", metrics::mse(pred.data, signal.eval_y.data), "dense evaluation samples"},
        {"mse_left", region_mse(pred, signal.eval_y, left), "dense samples left of the split"},
        {"mse_right", region_mse(pred, signal.eval_y, right), "dense samples right of the split"},
        {"mse_train", metrics::mse(train_pred.data, signal.train_y.data), "training samples"},
    };
}

Matrix curve_parameters(std::size_t n)
{
    Matrix p(n, 1);
    for (std::size_t k = 0; k < n; ++k)
        p(k, 0) = static_cast<double>(k) / static_cast<double>(n);
    return p;
}

Domain silhouette_raster_domain() { return Domain::cube(2, -1.5, 1.5); }

LossEval chamfer_loss(const Matrix& outputs, const Matrix& targets)
{
    if (outputs.rows == 0 || targets.rows == 0 || outputs.cols != targets.cols)
        throw std::invalid_argument("chamfer_loss: empty or mismatched point sets");
    const auto fwd = kernels::nearest_neighbors(outputs, targets);
    const auto bwd = kernels::nearest_neighbors(targets, outputs);
    const double n = static_cast<double>(outputs.rows);
    const double m = static_cast<double>(targets.rows);

    LossEval e;
    e.grad = Matrix(outputs.rows, outputs.cols);
    e.per_sample.resize(outputs.rows);
    double a = 0.0;
    for (std::size_t i = 0; i < outputs.rows; ++i) {
        a += fwd.sq_distance[i];
        e.per_sample[i] = std::sqrt(fwd.sq_distance[i]);
        for (std::size_t c = 0; c < outputs.cols; ++c)
            e.grad(i, c) += 2.0 / n * (outputs(i, c) - targets(fwd.index[i], c));
    }
    double b = 0.0;
    for (std::size_t j = 0; j < targets.rows; ++j) {
        b += bwd.sq_distance[j];
        const std::size_t i = bwd.index[j];
        for (std::size_t c = 0; c < outputs.cols; ++c)
            e.grad(i, c) += 2.0 / m * (outputs(i, c) - targets(j, c));
    }
    e.loss = a / n + b / m;
    return e;
}

TrainResult fit_silhouette(const TrainConfig& cfg, const Matrix& target_polygon, const TrainOptions& options)
{
    if (target_polygon.rows < 3 || target_polygon.cols != 2)
        throw std::invalid_argument("fit_silhouette: target must be a closed 2D polyline with >= 3 points");
    if (geom::polygon_self_intersects(target_polygon))
        std::clog << "warning: silhouette target self-intersects; IoU uses its even-odd fill\n";

    const Matrix p = curve_parameters(cfg.curve_samples);
    const Domain domain = Domain::cube(1, 0.0, 1.0);
    Matrix circle(p.rows, 2);
    for (std::size_t k = 0; k < p.rows; ++k) {
        circle(k, 0) = std::cos(2.0 * std::numbers::pi * p(k, 0));
        circle(k, 1) = std::sin(2.0 * std::numbers::pi * p(k, 0));
    }

    TrainConfig c = cfg;
    c.batch_size = 0;  // both Chamfer terms need the whole curve

    TrainOptions calib = options;
    calib.freeze_mask = true;
    calib.iterations = cfg.calibration_iterations;
    calib.stop_below = cfg.calibration_mse;
    calib.observer = nullptr;
    if (calib.default_grid.empty())
        calib.default_grid = {64};
    auto cal = train(c, regression_problem(p, circle, domain, nn::OutputActivation::linear), calib);

    TrainOptions deform = options;
    deform.initial_params = cal.model.params;
    deform.basis = cal.model.basis;
    deform.default_grid = calib.default_grid;
    TrainingProblem problem;
    problem.coords = p;
    problem.domain = domain;
    problem.output_dim = 2;
    problem.activation = nn::OutputActivation::linear;
    problem.loss = [targets = geom::resample_closed_polyline(target_polygon, cfg.target_samples)](
                       const Matrix& out, std::span<const std::size_t>) { return chamfer_loss(out, targets); };
    auto r = train(c, problem, deform);

    r.report.metrics = evaluate_silhouette(r.model, cfg, target_polygon);
    r.report.extra["calibration_iterations"] = cal.report.loss_trace.size();
    r.report.extra["calibration_mse"] = cal.report.loss_trace.empty() ? 0.0 : cal.report.loss_trace.back();
    return r;
}

std::vector<metrics::MetricResult> evaluate_silhouette(const Model& model, const TrainConfig& cfg,
                                                       const Matrix& target_polygon)
{
    const auto curve = model.predict(curve_parameters(cfg.curve_samples));
    const auto dom = silhouette_raster_domain();
    const auto a = geom::rasterize_polygon(curve, cfg.raster_resolution, dom);
    const auto b = geom::rasterize_polygon(target_polygon, cfg.raster_resolution, dom);
    const auto targets = geom::resample_closed_polyline(target_polygon, cfg.target_samples);
    const std::string raster = std::to_string(cfg.raster_resolution) + "^2 raster over [-1.5,1.5]^2";
    return {
        {"iou", metrics::iou(a.data, b.data), raster},
        {"chamfer", metrics::chamfer_symmetric(curve, targets),
         std::to_string(curve.rows) + " curve points vs " + std::to_string(targets.rows) + " target points"},
    };
}

OccupancySamples sample_occupancy_training(const geom::Shape& shape, std::size_t per_group, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const std::size_t d = shape.dim();
    const Matrix groups[3] = {uniform_points(per_group, d, rng), near_surface_points(shape, per_group, 0.1, rng),
                              near_surface_points(shape, per_group, 0.01, rng)};
    OccupancySamples s;
    s.coords = Matrix(3 * per_group, d);
    s.labels = Matrix(3 * per_group, 1);
    std::size_t row = 0;
    for (const auto& g : groups) {
        for (std::size_t i = 0; i < g.rows; ++i, ++row) {
            std::copy(g.row(i).begin(), g.row(i).end(), s.coords.row(row).begin());
            s.labels(row, 0) = shape.inside(g.row(i)) ? 1.0 : 0.0;
        }
    }
    return s;
}

TrainResult fit_occupancy(const TrainConfig& cfg, const geom::Shape& shape, const TrainOptions& options)
{
    const std::size_t d = shape.dim();
    auto samples = sample_occupancy_training(shape, cfg.samples_per_group, derived_seed(cfg.seed, SeedStream::data));
    auto problem = regression_problem(std::move(samples.coords), std::move(samples.labels), Domain::cube(d, -1.0, 1.0),
                                      nn::OutputActivation::sigmoid);
    TrainOptions opt = options;
    if (opt.default_grid.empty())
        opt.default_grid = std::vector<std::size_t>(d, d == 2 ? 32 : 16);
    auto r = train(cfg, problem, opt);
    r.report.metrics = evaluate_occupancy(r.model, cfg, shape);
    return r;
}

std::vector<metrics::MetricResult> evaluate_occupancy(const Model& model, const TrainConfig& cfg,
                                                      const geom::Shape& shape)
{
    std::mt19937_64 rng(derived_seed(cfg.seed, SeedStream::eval));
    const Matrix uni = uniform_points(cfg.eval_samples, shape.dim(), rng);
    const Matrix near = near_surface_points(shape, cfg.eval_samples, kNearSurfaceEvalNoise, rng);

    const auto uni_truth = inside_labels(shape, uni);
    const auto near_truth = inside_labels(shape, near);
    const auto uni_pred = predicted_inside(model.predict(uni));
    const auto near_pred = predicted_inside(model.predict(near));

    std::size_t far = 0, far_fp = 0;
    for (std::size_t i = 0; i < uni.rows; ++i) {
        if (uni_truth[i] || shape.distance_to_surface(uni.row(i)) <= kFarFieldDistance)
            continue;
        ++far;
        far_fp += uni_pred[i];
    }

    const double iou_u = metrics::iou(uni_pred, uni_truth);
    const double iou_n = metrics::iou(near_pred, near_truth);
    const std::string n = std::to_string(cfg.eval_samples);
    return {
        {"iou", 0.5 * (iou_u + iou_n), n + " uniform + " + n + " near-surface"},
        {"iou_uniform", iou_u, n + " uniform"},
        {"iou_near", iou_n, n + " near-surface"},
        {"far_field_fp_rate", far ? static_cast<double>(far_fp) / static_cast<double>(far) : 0.0,
         std::to_string(far) + " uniform samples outside the shape"},
    };
}

std::string method_label(const TrainConfig& cfg)
{
    std::string base = cfg.encoding == enc::EncodingKind::fourier ? "ff" : enc::to_string(cfg.encoding);
    return cfg.sape_enabled ? "sape+" + base : base;
}

std::vector<SweepEntry> sweep_sigma(const TrainConfig& base, std::span<const double> sigmas, const RunFn& run)
{
    std::vector<SweepEntry> out;
    for (const bool sape : {false, true}) {
        for (const double s : sigmas) {
            TrainConfig c = base;
            c.sigma = s;
            c.sape_enabled = sape;
            out.push_back({method_label(c), s, run(c).report});
        }
    }
    return out;
}

std::vector<SweepEntry> sweep_grid(const TrainConfig& base, std::span<const std::size_t> resolutions, const RunFn& run)
{
    std::vector<SweepEntry> out;
    for (const std::size_t r : resolutions) {
        TrainConfig c = base;
        c.sape_enabled = true;
        c.spatial_enabled = true;
        c.grid_resolution = {r};
        out.push_back({method_label(c), static_cast<double>(r), run(c).report});
    }
    return out;
}

nlohmann::json sweep_to_json(const std::vector<SweepEntry>& entries)
{
    auto arr = nlohmann::json::array();
    for (const auto& e : entries) {
        auto j = report_to_json(e.report);
        j.erase("loss_trace");
        j["method"] = e.method;
        j["value"] = e.value;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace sape::tasks
