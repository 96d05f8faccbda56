#include <doctest.h>

#include <filesystem>

#include "sape/config.hpp"
#include "sape/run.hpp"
#include "sape/tasks.hpp"
#include "support.hpp"

using namespace sape;
using tasks::Task;
using tasks::TrainConfig;

namespace {

TrainConfig small_image_config()
{
    auto c = tasks::default_config(Task::image2d);
    c.hidden_width = 32;
    c.depth = 2;
    c.num_frequencies = 16;
    c.sigma = 5.0;
    c.iterations = 120;
    c.lr = 5e-3;
    c.seed = 7;
    return c;
}

// Parameters after every iteration.
std::vector<nn::MlpParams> trajectory(const TrainConfig& cfg, const io::Image& img)
{
    std::vector<nn::MlpParams> out;
    tasks::TrainOptions o;
    o.observer = [&](std::size_t, const tasks::Model& m) { out.push_back(m.params); };
    tasks::fit_image(cfg, img, o);
    return out;
}

} // namespace

TEST_CASE("config json round-trip and validation")
{
    for (auto t : {Task::image2d, Task::signal1d, Task::silhouette2d, Task::occupancy}) {
        auto c = tasks::default_config(t);
        c.grid_resolution = {3, 5};
        c.input = "fixture:x";
        const nlohmann::json j = c;
        CHECK(j.get<TrainConfig>() == c);
    }
    auto bad = tasks::default_config(Task::image2d);
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(tasks::validate(bad), std::invalid_argument);
    CHECK_THROWS_AS(tasks::task_from_string("video"), std::invalid_argument);
}

TEST_CASE("derived seeds separate streams")
{
    using tasks::SeedStream;
    CHECK(tasks::derived_seed(1, SeedStream::basis) != tasks::derived_seed(1, SeedStream::params));
    CHECK(tasks::derived_seed(1, SeedStream::basis) != tasks::derived_seed(2, SeedStream::basis));
    CHECK(tasks::derived_seed(1, SeedStream::data) == tasks::derived_seed(1, SeedStream::data));
}

TEST_CASE("pixel coordinates and the training quarter")
{
    const auto c = tasks::pixel_coords(3, 2);
    CHECK(c(0, 0) == -1.0);
    CHECK(c(0, 1) == 1.0);  // top row is y = +1
    CHECK(c(5, 0) == 1.0);
    CHECK(c(5, 1) == -1.0);
    CHECK(c(1, 0) == 0.0);
    CHECK(tasks::training_pixels(4, 4) == std::vector<std::size_t>{0, 2, 8, 10});
    CHECK(tasks::training_pixels(5, 3).size() == 6);
}

TEST_CASE("mask disabled reproduces a plain static-encoding loop bit for bit")
{
    auto cfg = small_image_config();
    cfg.sape_enabled = false;
    const auto img = fixtures::image_fixture("two-tone-32");
    const auto fit = tasks::fit_image(cfg, img);

    const auto coords_all = tasks::pixel_coords(img.width, img.height);
    const auto pix = tasks::training_pixels(img.width, img.height);
    Matrix targets(pix.size(), img.channels);
    for (std::size_t i = 0; i < pix.size(); ++i)
        for (std::size_t ch = 0; ch < img.channels; ++ch)
            targets(i, ch) = img.data[pix[i] * img.channels + ch];
    const auto plain = testing::plain_static_run(cfg, gather_rows(coords_all, pix), targets,
                                                 Domain::cube(2, -1.0, 1.0), nn::OutputActivation::sigmoid,
                                                 cfg.iterations);
    CHECK(fit.report.loss_trace == plain.loss_trace);
    CHECK(fit.model.params == plain.params);
}

TEST_CASE("spatial adaptivity off equals a one-node grid")
{
    auto off = small_image_config();
    off.spatial_enabled = false;
    auto one = small_image_config();
    one.grid_resolution = {1, 1};
    const auto img = fixtures::image_fixture("two-tone-32");
    const auto a = trajectory(off, img);
    const auto b = trajectory(one, img);
    REQUIRE(a.size() == off.iterations);
    CHECK(a == b);
}

TEST_CASE("mask enabled changes the trajectory")
{
    auto on = small_image_config();
    auto off = small_image_config();
    off.sape_enabled = false;
    on.iterations = off.iterations = 20;
    const auto img = fixtures::image_fixture("two-tone-32");
    CHECK_FALSE(trajectory(on, img).back() == trajectory(off, img).back());
}

TEST_CASE("training is deterministic")
{
    auto cfg = small_image_config();
    cfg.iterations = 40;
    cfg.batch_size = 100;
    const auto img = fixtures::image_fixture("two-tone-32");
    const auto a = tasks::fit_image(cfg, img);
    const auto b = tasks::fit_image(cfg, img);
    CHECK(a.report.loss_trace == b.report.loss_trace);
    CHECK(a.model.params == b.model.params);
    CHECK(a.model.grid.clocks == b.model.grid.clocks);
}

TEST_CASE("constant image is fitted almost exactly")
{
    auto cfg = small_image_config();
    cfg.iterations = 500;
    const auto img = fixtures::constant_image(16, 0.3, 0.6, 0.2);
    const auto fit = tasks::fit_image(cfg, img);
    CHECK(fit.report.metric("psnr") > 40.0);
}

TEST_CASE("mean clock never decreases")
{
    auto cfg = small_image_config();
    double last = 0.0;
    bool monotone = true;
    tasks::TrainOptions o;
    o.observer = [&](std::size_t, const tasks::Model& m) {
        const double c = m.grid.mean_clock();
        monotone = monotone && c >= last;
        last = c;
    };
    tasks::fit_image(cfg, fixtures::image_fixture("two-tone-32"), o);
    CHECK(monotone);
    CHECK(last > 0.0);
}

TEST_CASE("a sine is regressed to small error")
{
    auto cfg = tasks::default_config(Task::signal1d);
    cfg.sigma = 2.0;
    cfg.num_frequencies = 16;
    cfg.hidden_width = 32;
    cfg.depth = 2;
    cfg.iterations = 1500;
    cfg.lr = 5e-3;
    const auto fit = tasks::fit_signal_1d(cfg, fixtures::sine_signal(128, 512));
    CHECK(fit.report.metric("mse_dense") < 1e-4);
}

TEST_CASE("silhouette calibration lands on the unit circle")
{
    auto cfg = tasks::default_config(Task::silhouette2d);
    cfg.hidden_width = 32;
    cfg.depth = 2;
    cfg.num_frequencies = 16;
    cfg.iterations = 1;
    cfg.epsilon = 1e9;  // every node holds, so the single deformation step keeps the calibrated mask
    cfg.curve_samples = 128;
    cfg.target_samples = 256;
    cfg.raster_resolution = 128;
    const auto fit = tasks::fit_silhouette(cfg, fixtures::circle_polygon(256, 1.0));
    CHECK(fit.report.extra.at("calibration_mse").get<double>() < cfg.calibration_mse);
    // MSE 1e-4 per coordinate leaves point errors of about 0.014 rms on a 32-wide net.
    CHECK(fit.report.metric("chamfer") < 4e-3);
    CHECK(fit.report.metric("iou") > 0.93);
}

TEST_CASE("chamfer loss gradient and feedback")
{
    Matrix out(2, 2), tgt(1, 2);
    out.data = {0, 0, 3, 4};
    tgt.data = {0, 0};
    const auto le = tasks::chamfer_loss(out, tgt);
    // forward mean 12.5, backward 0
    CHECK(le.loss == 12.5);
    CHECK(le.per_sample == std::vector<double>{0.0, 5.0});
    CHECK(le.grad(1, 0) == 3.0);
    CHECK(le.grad(1, 1) == 4.0);
}

TEST_CASE("occupancy training samples follow the three groups")
{
    const auto shape = fixtures::shape_fixture("circle");
    const auto s = tasks::sample_occupancy_training(*shape, 100, 3);
    CHECK(s.coords.rows == 300);
    CHECK(s.labels.rows == 300);
    for (std::size_t i = 0; i < 300; ++i)
        CHECK(s.labels(i, 0) == (shape->inside(s.coords.row(i)) ? 1.0 : 0.0));
    for (std::size_t i = 200; i < 300; ++i)
        CHECK(shape->distance_to_surface(s.coords.row(i)) < 0.06);
}

TEST_CASE("run directory re-evaluates to the reported metrics")
{
    const auto dir = std::filesystem::temp_directory_path() / "sape_test_run";
    std::filesystem::remove_all(dir);
    for (auto task : {Task::image2d, Task::signal1d, Task::silhouette2d, Task::occupancy}) {
        auto cfg = tasks::default_config(task);
        cfg.hidden_width = 16;
        cfg.depth = 1;
        cfg.num_frequencies = 8;
        cfg.iterations = 5;
        cfg.calibration_iterations = 5;
        cfg.curve_samples = 64;
        cfg.target_samples = 64;
        cfg.raster_resolution = 64;
        cfg.samples_per_group = 200;
        cfg.eval_samples = 200;
        cfg.input = task == Task::image2d ? "fixture:two-tone-32" : "";
        const auto ref = runs::load_reference(cfg);
        const auto fit = runs::run_task(cfg, ref);
        runs::write_run(dir, fit, ref);
        const auto ev = runs::evaluate_run(dir);
        CHECK_MESSAGE(ev.matches, tasks::to_string(task));
        const auto loaded = runs::load_run(dir);
        CHECK(loaded.config == cfg);
        CHECK(loaded.model.params == fit.model.params);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("sweeps label static and adaptive runs")
{
    auto cfg = small_image_config();
    cfg.iterations = 2;
    const double sigmas[] = {1.0, 3.0};
    const auto img = fixtures::image_fixture("two-tone-32");
    const auto entries = tasks::sweep_sigma(cfg, sigmas, [&](const TrainConfig& c) { return tasks::fit_image(c, img); });
    REQUIRE(entries.size() == 4);
    CHECK(entries[0].method == "ff");
    CHECK(entries[1].value == 3.0);
    CHECK(entries[2].method == "sape+ff");
    CHECK(entries[3].value == 3.0);
    CHECK(tasks::sweep_to_json(entries).size() == 4);
}
