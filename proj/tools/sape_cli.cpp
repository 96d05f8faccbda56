// sape: fit coordinate networks with spatially-adaptive progressive encoding.
//
//   sape fit-image --input img.png --encoding fourier --sape --sigma 20 --out run1
//   sape sweep-sigma --values 1,10,20,30,40 --out sweep1
//   sape evaluate --out run1
//
// Exit codes: 0 success, 1 runtime failure (I/O, mismatch on evaluate),
// 2 bad arguments, 3 training diverged.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "sape/adam.hpp"
#include "sape/blob.hpp"
#include "sape/run.hpp"

namespace {

using sape::tasks::Task;
using sape::tasks::TrainConfig;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

// Flag values as parsed; applied on top of the task defaults.
struct Flags {
    std::string encoding;
    std::optional<bool> sape;
    std::optional<bool> spatial;
    std::optional<double> sigma;
    std::optional<std::size_t> freqs;
    std::vector<std::size_t> grid_res;
    std::optional<std::size_t> iters;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
    std::optional<double> lr;
    std::optional<std::size_t> width;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> feedback;
    std::string input;
    std::string out;
    std::string task = "image2d";
    std::vector<double> sigma_values;
    std::vector<std::size_t> grid_values;
};

void add_train_flags(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--encoding", f.encoding, "Encoding: none, fourier or rbf")
        ->check(CLI::IsMember({"none", "fourier", "rbf"}));
    cmd->add_flag("--sape,!--no-sape", f.sape, "Enable/disable the progressive mask");
    cmd->add_flag("--spatial,!--no-spatial", f.spatial, "Enable/disable spatial adaptivity (grid)");
    cmd->add_option("--sigma", f.sigma, "Fourier sampling scale")->check(CLI::PositiveNumber);
    cmd->add_option("--freqs", f.freqs, "Number of Fourier frequencies")->check(CLI::PositiveNumber);
    cmd->add_option("--grid-res", f.grid_res, "Mask grid resolution, one value or one per axis")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iters", f.iters, "Training iterations T")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", f.epsilon, "Convergence threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "Run seed");
    cmd->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--width", f.width, "Hidden layer width")->check(CLI::PositiveNumber);
    cmd->add_option("--depth", f.depth, "Hidden layer count")->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", f.batch, "Minibatch size (0: task default)");
    cmd->add_option("--feedback-interval", f.feedback, "Iterations per mask feedback round")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--input", f.input, "Input file or fixture:<name>");
    cmd->add_option("--out", f.out, "Run directory")->required();
}

TrainConfig make_config(Task task, const Flags& f)
{
    TrainConfig c = sape::tasks::default_config(task);
    if (!f.encoding.empty())
        c.encoding = sape::enc::encoding_kind_from_string(f.encoding);
    if (f.sape)
        c.sape_enabled = *f.sape;
    if (f.spatial)
        c.spatial_enabled = *f.spatial;
    if (f.sigma)
        c.sigma = *f.sigma;
    if (f.freqs)
        c.num_frequencies = *f.freqs;
    if (!f.grid_res.empty())
        c.grid_resolution = f.grid_res;
    if (f.iters)
        c.iterations = *f.iters;
    if (f.epsilon)
        c.epsilon = *f.epsilon;
    if (f.seed)
        c.seed = *f.seed;
    if (f.lr)
        c.lr = *f.lr;
    if (f.width)
        c.hidden_width = *f.width;
    if (f.depth)
        c.depth = *f.depth;
    if (f.batch)
        c.batch_size = *f.batch;
    if (f.feedback)
        c.feedback_interval = *f.feedback;
    c.input = f.input;
    sape::tasks::validate(c);
    return c;
}

void print_metrics(const std::vector<sape::metrics::MetricResult>& ms)
{
    for (const auto& m : ms)
        std::cout << "  " << m.name << " = " << m.value << "  (" << m.support << ")\n";
}

int fit(Task task, const Flags& f)
{
    const auto cfg = make_config(task, f);
    const auto ref = sape::runs::load_reference(cfg);
    const auto result = sape::runs::run_task(cfg, ref);
    sape::runs::write_run(f.out, result, ref);
    std::cout << sape::tasks::method_label(cfg) << " on " << sape::tasks::to_string(task) << ", "
              << result.report.loss_trace.size() << " iterations, " << result.report.wall_time_s << " s\n";
    print_metrics(result.report.metrics);
    std::cout << "wrote " << f.out << "\n";
    return 0;
}

int sweep(bool over_sigma, const Flags& f)
{
    const Task task = sape::tasks::task_from_string(f.task);
    const auto base = make_config(task, f);
    const auto ref = sape::runs::load_reference(base);
    const sape::tasks::RunFn run = [&](const TrainConfig& c) {
        std::cerr << sape::tasks::method_label(c) << " sigma=" << c.sigma << " grid="
                  << (c.grid_resolution.empty() ? 0 : c.grid_resolution[0]) << "\n";
        return sape::runs::run_task(c, ref);
    };
    const auto entries = over_sigma ? sape::tasks::sweep_sigma(base, f.sigma_values, run)
                                    : sape::tasks::sweep_grid(base, f.grid_values, run);
    nlohmann::json report{{"config", base}, {"sweep", over_sigma ? "sigma" : "grid_resolution"},
                          {"runs", sape::tasks::sweep_to_json(entries)}};
    std::filesystem::create_directories(f.out);
    sape::io::write_file_atomic(std::filesystem::path(f.out) / "report.json", report.dump(2) + "\n");
    for (const auto& e : entries) {
        std::cout << e.method << " @ " << e.value << ":";
        for (const auto& m : e.report.metrics)
            std::cout << " " << m.name << "=" << m.value;
        std::cout << "\n";
    }
    return 0;
}

int evaluate(const Flags& f)
{
    const auto ev = sape::runs::evaluate_run(f.out);
    std::cout << "recomputed:\n";
    print_metrics(ev.recomputed);
    std::cout << (ev.matches ? "matches report.json\n" : "DIFFERS from report.json\n");
    return ev.matches ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spatially-adaptive progressive encoding for coordinate networks"};
    app.require_subcommand(1);
    Flags f;

    const std::pair<const char*, Task> fits[] = {
        {"fit-image", Task::image2d},
        {"fit-signal", Task::signal1d},
        {"fit-silhouette", Task::silhouette2d},
        {"fit-occupancy", Task::occupancy},
    };
    std::vector<std::pair<CLI::App*, Task>> fit_cmds;
    for (const auto& [name, task] : fits) {
        auto* cmd = app.add_subcommand(name, std::string("Fit the ") + sape::tasks::to_string(task) + " task");
        add_train_flags(cmd, f);
        fit_cmds.emplace_back(cmd, task);
    }

    auto* sweep_sigma = app.add_subcommand("sweep-sigma", "Static and SAPE runs over several sigmas");
    add_train_flags(sweep_sigma, f);
    sweep_sigma->add_option("--task", f.task, "Task to sweep")
        ->check(CLI::IsMember({"image2d", "signal1d", "silhouette2d", "occupancy"}));
    sweep_sigma->add_option("--values", f.sigma_values, "Comma-separated sigmas")->delimiter(',')->required();

    auto* sweep_grid = app.add_subcommand("sweep-grid", "SAPE runs over several grid resolutions");
    add_train_flags(sweep_grid, f);
    sweep_grid->add_option("--task", f.task, "Task to sweep")
        ->check(CLI::IsMember({"image2d", "signal1d", "silhouette2d", "occupancy"}));
    sweep_grid->add_option("--values", f.grid_values, "Comma-separated resolutions")->delimiter(',')->required();

    auto* eval = app.add_subcommand("evaluate", "Recompute the metrics of a run directory");
    eval->add_option("--out", f.out, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        for (const auto& [cmd, task] : fit_cmds)
            if (cmd->parsed())
                return fit(task, f);
        if (sweep_sigma->parsed())
            return sweep(true, f);
        if (sweep_grid->parsed())
            return sweep(false, f);
        if (eval->parsed())
            return evaluate(f);
    } catch (const sape::nn::TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
