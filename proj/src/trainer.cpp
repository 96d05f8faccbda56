#include "sape/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sape/adam.hpp"

namespace sape::tasks {

namespace {

constexpr std::size_t kPredictChunk = 4096;

// row *= alpha(p) for one encoded sample.
void mask_row(const Model& m, std::span<const mask::Neighbor> nb, std::span<double> groups, std::span<double> row)
{
    mask::blend_group_alpha(m.grid, m.schedule, nb, groups);
    const auto& gid = m.basis.group_ids;
    for (std::size_t j = m.basis.dim; j < row.size(); ++j)
        row[j] *= groups[gid[j]];
}

} // namespace

Matrix Model::masked_features(const Matrix& coords) const
{
    Matrix x = enc::encode_batch(basis, coords);
    if (!masked)
        return x;
    const auto n = static_cast<std::ptrdiff_t>(coords.rows);
#pragma omp parallel
    {
        std::vector<double> groups(schedule.n_groups + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(i);
            const auto nb = mask::interp_weights(grid, coords.row(r));
            mask_row(*this, nb, groups, x.row(r));
        }
    }
    return x;
}

Matrix Model::predict(const Matrix& coords) const
{
    Matrix out(coords.rows, params.output_dim);
    for (std::size_t start = 0; start < coords.rows; start += kPredictChunk) {
        const std::size_t count = std::min(kPredictChunk, coords.rows - start);
        std::vector<std::size_t> ids(count);
        std::iota(ids.begin(), ids.end(), start);
        const auto cache = nn::mlp_forward(params, masked_features(gather_rows(coords, ids)));
        std::copy(cache.output().data.begin(), cache.output().data.end(),
                  out.data.begin() + static_cast<std::ptrdiff_t>(start * out.cols));
    }
    return out;
}

LossEval mse_loss(const Matrix& outputs, const Matrix& targets, std::span<const std::size_t> ids)
{
    if (outputs.rows != ids.size() || outputs.cols != targets.cols)
        throw std::invalid_argument("mse_loss: outputs do not match the batch");
    LossEval e;
    e.per_sample.assign(outputs.rows, 0.0);
    e.grad = Matrix(outputs.rows, outputs.cols);
    const double scale = 2.0 / static_cast<double>(outputs.rows * outputs.cols);
    double total = 0.0;
    for (std::size_t i = 0; i < outputs.rows; ++i) {
        const auto y = targets.row(ids[i]);
        double s = 0.0;
        for (std::size_t c = 0; c < outputs.cols; ++c) {
            const double diff = outputs(i, c) - y[c];
            s += diff * diff;
            e.grad(i, c) = scale * diff;
        }
        e.per_sample[i] = s / static_cast<double>(outputs.cols);
        total += e.per_sample[i];
    }
    e.loss = total / static_cast<double>(outputs.rows);
    return e;
}

TrainingProblem regression_problem(Matrix coords, Matrix targets, Domain domain, nn::OutputActivation activation)
{
    if (coords.rows != targets.rows)
        throw std::invalid_argument("regression_problem: coords and targets differ in length");
    TrainingProblem p;
    p.coords = std::move(coords);
    p.domain = std::move(domain);
    p.output_dim = targets.cols;
    p.activation = activation;
    p.loss = [targets = std::move(targets)](const Matrix& out, std::span<const std::size_t> ids) {
        return mse_loss(out, targets, ids);
    };
    return p;
}

const metrics::MetricResult* TrainReport::find(const std::string& name) const
{
    for (const auto& m : metrics)
        if (m.name == name)
            return &m;
    return nullptr;
}

double TrainReport::metric(const std::string& name) const
{
    const auto* m = find(name);
    if (!m)
        throw std::out_of_range("report has no metric '" + name + "'");
    return m->value;
}

nlohmann::json report_to_json(const TrainReport& r)
{
    nlohmann::json j;
    j["config"] = r.config;
    j["metrics"] = nlohmann::json::array();
    for (const auto& m : r.metrics)
        j["metrics"].push_back({{"name", m.name}, {"value", m.value}, {"support", m.support}});
    j["loss_trace"] = r.loss_trace;
    j["wall_time_s"] = r.wall_time_s;
    j["heatmap_shape"] = r.heatmap_shape;
    for (const auto& [k, v] : r.extra.items())
        j[k] = v;
    return j;
}

enc::EncodingBasis make_basis(const TrainConfig& cfg, const Domain& domain)
{
    const std::size_t d = domain.dim();
    switch (cfg.encoding) {
    case enc::EncodingKind::identity_only:
        return enc::identity_basis(d);
    case enc::EncodingKind::fourier:
        return enc::sample_fourier_basis(d, cfg.num_frequencies, cfg.sigma, derived_seed(cfg.seed, SeedStream::basis));
    case enc::EncodingKind::rbf_grid: {
        std::vector<enc::RbfTier> tiers;
        const double width = domain.hi[0] - domain.lo[0];
        for (std::size_t k = 0; k < cfg.rbf_tiers; ++k) {
            const std::size_t g = std::max<std::size_t>(2, cfg.rbf_grid >> k);
            tiers.push_back({g, cfg.rbf_bandwidth_scale * width / static_cast<double>(g - 1)});
        }
        return enc::build_rbf_grid_basis(d, tiers, domain);
    }
    }
    throw std::invalid_argument("make_basis: unknown encoding");
}

TrainResult train(const TrainConfig& cfg, const TrainingProblem& problem, const TrainOptions& options)
{
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = problem.domain.dim();
    const std::size_t n_samples = problem.coords.rows;
    if (problem.coords.cols != d || n_samples == 0)
        throw std::invalid_argument("train: coordinates do not match the problem domain");
    if (!problem.loss)
        throw std::invalid_argument("train: problem has no loss");

    const std::size_t iterations = options.iterations ? options.iterations : cfg.iterations;

    Model model;
    model.basis = options.basis ? *options.basis : make_basis(cfg, problem.domain);
    model.masked = cfg.sape_enabled;
    model.schedule = mask::make_schedule(static_cast<double>(cfg.iterations), model.basis.num_groups(), d);
    model.grid = mask::make_grid(effective_grid_resolution(cfg, d, options.default_grid.empty()
                                                                       ? std::vector<std::size_t>(d, 1)
                                                                       : options.default_grid),
                                 problem.domain, cfg.epsilon, cfg.feedback_interval);
    if (options.initial_params) {
        model.params = *options.initial_params;
        if (model.params.input_dim() != model.basis.output_dim() || model.params.output_dim != problem.output_dim)
            throw std::invalid_argument("train: initial parameters do not fit the encoder / problem");
    } else {
        model.params = nn::init_params(static_cast<int>(model.basis.output_dim()), static_cast<int>(cfg.hidden_width),
                                       static_cast<int>(cfg.depth), static_cast<int>(problem.output_dim),
                                       derived_seed(cfg.seed, SeedStream::params), problem.activation);
    }
    auto adam = nn::make_adam(model.params, nn::AdamConfig{cfg.lr});

    const Matrix encoded = enc::encode_batch(model.basis, problem.coords);
    std::vector<std::vector<mask::Neighbor>> neighbors;
    if (model.masked) {
        neighbors.resize(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i)
            neighbors[i] = mask::interp_weights(model.grid, problem.coords.row(i));
    }

    const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size >= n_samples) ? n_samples : cfg.batch_size;
    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 batch_rng(derived_seed(cfg.seed, SeedStream::batches));
    std::size_t cursor = n_samples;  // forces a shuffle before the first minibatch

    TrainResult result;
    result.report.loss_trace.reserve(iterations);
    std::vector<std::size_t> ids(batch);

    for (std::size_t it = 0; it < iterations; ++it) {
        if (batch == n_samples) {
            std::iota(ids.begin(), ids.end(), 0);
        } else {
            for (std::size_t k = 0; k < batch; ++k) {
                if (cursor == n_samples) {
                    std::shuffle(order.begin(), order.end(), batch_rng);
                    cursor = 0;
                }
                ids[k] = order[cursor++];
            }
        }

        Matrix x = gather_rows(encoded, ids);
        if (model.masked) {
            const auto rows = static_cast<std::ptrdiff_t>(batch);
#pragma omp parallel
            {
                std::vector<double> groups(model.schedule.n_groups + 1);
#pragma omp for schedule(static)
                for (std::ptrdiff_t i = 0; i < rows; ++i) {
                    const auto r = static_cast<std::size_t>(i);
                    mask_row(model, neighbors[ids[r]], groups, x.row(r));
                }
            }
        }

        const auto cache = nn::mlp_forward(model.params, x);
        LossEval le = problem.loss(cache.output(), ids);
        if (!std::isfinite(le.loss))
            throw nn::TrainingDiverged(static_cast<std::int64_t>(it), "non-finite loss");
        result.report.loss_trace.push_back(le.loss);

        if (model.masked && !options.freeze_mask)
            for (std::size_t i = 0; i < batch; ++i)
                mask::accumulate_loss(model.grid, neighbors[ids[i]], le.per_sample[i]);

        const auto grads = nn::mlp_backward(model.params, cache, le.grad);
        nn::adam_step(model.params, grads, adam, static_cast<std::int64_t>(it));

        if (model.masked && !options.freeze_mask && (it + 1) % cfg.feedback_interval == 0)
            mask::advance(model.grid);

        if (options.observer)
            options.observer(it, model);
        if (le.loss < options.stop_below)
            break;
    }

    if (!model.params.all_finite())
        throw nn::TrainingDiverged(static_cast<std::int64_t>(iterations), "non-finite parameters");

    result.report.heatmap = mask::heatmap(model.grid, model.schedule, model.basis);
    result.report.heatmap_shape = model.grid.resolution;
    result.report.config = cfg;
    result.report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.model = std::move(model);
    return result;
}

} // namespace sape::tasks
