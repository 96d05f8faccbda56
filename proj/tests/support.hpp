#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "sape/adam.hpp"
#include "sape/mlp.hpp"
#include "sape/trainer.hpp"

namespace sape::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (auto& v : m.data)
        v = u(rng);
    return m;
}

// Scalar probe loss L = sum_ij r_ij * out_ij, so dL/dout = r.
inline double probe_loss(const nn::MlpParams& p, const Matrix& x, const Matrix& r)
{
    const auto out = nn::mlp_forward(p, x).output();
    double s = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        s += r.data[i] * out.data[i];
    return s;
}

// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true value
// is ~0 from turning round-off into a large ratio.
inline double relative_error(double a, double n, double floor = 1e-6)
{
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t entries = 0;
};

// Analytic gradients of the probe loss against central differences.
inline GradCheck finite_difference_check(nn::MlpParams p, const Matrix& x, const Matrix& r, double h = 1e-5)
{
    const auto cache = nn::mlp_forward(p, x);
    const auto grads = nn::mlp_backward(p, cache, r);
    GradCheck out;
    auto probe = [&](double& slot, double analytic) {
        const double saved = slot;
        slot = saved + h;
        const double up = probe_loss(p, x, r);
        slot = saved - h;
        const double down = probe_loss(p, x, r);
        slot = saved;
        out.max_rel_error = std::max(out.max_rel_error, relative_error(analytic, (up - down) / (2.0 * h)));
        ++out.entries;
    };
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        for (std::size_t i = 0; i < p.layers[k].weight.data.size(); ++i)
            probe(p.layers[k].weight.data[i], grads[k].weight.data[i]);
        for (std::size_t i = 0; i < p.layers[k].bias.size(); ++i)
            probe(p.layers[k].bias[i], grads[k].bias[i]);
    }
    return out;
}

// Symmetric Chamfer distance by a plain double loop over all pairs.
inline double chamfer_oracle(const Matrix& a, const Matrix& b)
{
    auto one_way = [](const Matrix& x, const Matrix& y) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            double best = INFINITY;
            for (std::size_t j = 0; j < y.rows; ++j) {
                double d = 0.0;
                for (std::size_t c = 0; c < x.cols; ++c)
                    d += (x(i, c) - y(j, c)) * (x(i, c) - y(j, c));
                best = std::min(best, d);
            }
            total += best;
        }
        return total / static_cast<double>(x.rows);
    };
    return one_way(a, b) + one_way(b, a);
}

struct PlainRun {
    std::vector<double> loss_trace;
    nn::MlpParams params;
};

// Static-encoding training written out directly from the building blocks:
// encode once, then full-batch forward, MSE, backward and Adam. Used as the
// oracle for runs with the mask disabled.
inline PlainRun plain_static_run(const tasks::TrainConfig& cfg, const Matrix& coords, const Matrix& targets,
                                 const Domain& domain, nn::OutputActivation activation, std::size_t iterations)
{
    const auto basis = tasks::make_basis(cfg, domain);
    PlainRun run;
    run.params = nn::init_params(static_cast<int>(basis.output_dim()), static_cast<int>(cfg.hidden_width),
                                 static_cast<int>(cfg.depth), static_cast<int>(targets.cols),
                                 tasks::derived_seed(cfg.seed, tasks::SeedStream::params), activation);
    auto adam = nn::make_adam(run.params, nn::AdamConfig{cfg.lr});
    const Matrix x = enc::encode_batch(basis, coords);
    std::vector<std::size_t> ids(coords.rows);
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = i;
    for (std::size_t it = 0; it < iterations; ++it) {
        const auto cache = nn::mlp_forward(run.params, x);
        const auto le = tasks::mse_loss(cache.output(), targets, ids);
        run.loss_trace.push_back(le.loss);
        nn::adam_step(run.params, nn::mlp_backward(run.params, cache, le.grad), adam, static_cast<std::int64_t>(it));
    }
    return run;
}

} // namespace sape::testing
