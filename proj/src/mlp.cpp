#include "sape/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "sape/blob.hpp"
#include "sape/kernels.hpp"

namespace sape::nn {

std::string to_string(OutputActivation a)
{
    return a == OutputActivation::sigmoid ? "sigmoid" : "linear";
}

OutputActivation output_activation_from_string(const std::string& s)
{
    if (s == "sigmoid")
        return OutputActivation::sigmoid;
    if (s == "linear")
        return OutputActivation::linear;
    throw std::invalid_argument("unknown output activation: " + s);
}

std::size_t MlpParams::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers)
        n += l.weight.data.size() + l.bias.size();
    return n;
}

bool MlpParams::all_finite() const
{
    for (const auto& l : layers) {
        for (double w : l.weight.data)
            if (!std::isfinite(w))
                return false;
        for (double b : l.bias)
            if (!std::isfinite(b))
                return false;
    }
    return true;
}

LayerSet zeros_like(const MlpParams& params)
{
    LayerSet out;
    out.reserve(params.layers.size());
    for (const auto& l : params.layers)
        out.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
    return out;
}

MlpParams init_params(int in_dim, int hidden_width, int depth, int out_dim, std::uint64_t seed,
                      OutputActivation output_activation)
{
    if (in_dim < 1 || hidden_width < 1 || depth < 1 || out_dim < 1)
        throw std::invalid_argument("init_params: all dimensions must be >= 1");

    MlpParams p;
    p.hidden_width = static_cast<std::size_t>(hidden_width);
    p.depth = static_cast<std::size_t>(depth);
    p.output_dim = static_cast<std::size_t>(out_dim);
    p.output_activation = output_activation;

    std::vector<std::size_t> widths{static_cast<std::size_t>(in_dim)};
    for (int i = 0; i < depth; ++i)
        widths.push_back(p.hidden_width);
    widths.push_back(p.output_dim);

    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths[k]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer layer{Matrix(widths[k + 1], widths[k]), std::vector<double>(widths[k + 1])};
        for (double& w : layer.weight.data)
            w = dist(rng);
        for (double& b : layer.bias)
            b = dist(rng);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

namespace {

double sigmoid(double z)
{
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

ForwardCache mlp_forward(const MlpParams& params, const Matrix& inputs)
{
    if (params.layers.empty())
        throw std::invalid_argument("mlp_forward: network has no layers");
    if (inputs.cols != params.input_dim())
        throw std::invalid_argument("mlp_forward: input width " + std::to_string(inputs.cols) +
                                    " does not match network input " + std::to_string(params.input_dim()));

    ForwardCache cache;
    cache.input = inputs;
    const Matrix* x = &cache.input;
    const std::size_t last = params.layers.size() - 1;
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto& layer = params.layers[k];
        Matrix z = kernels::matmul(*x, transpose(layer.weight));
        for (std::size_t i = 0; i < z.rows; ++i) {
            auto r = z.row(i);
            for (std::size_t j = 0; j < z.cols; ++j)
                r[j] += layer.bias[j];
        }
        Matrix a = z;
        if (k < last) {
            for (double& v : a.data)
                v = v > 0.0 ? v : 0.0;
        } else if (params.output_activation == OutputActivation::sigmoid) {
            for (double& v : a.data)
                v = sigmoid(v);
        }
        cache.pre.push_back(std::move(z));
        cache.post.push_back(std::move(a));
        x = &cache.post.back();
    }
    return cache;
}

LayerSet mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& d_output)
{
    const std::size_t nl = params.layers.size();
    if (cache.pre.size() != nl || cache.post.size() != nl || cache.input.cols != params.input_dim())
        throw std::logic_error("mlp_backward: cache does not match the network");
    for (std::size_t k = 0; k < nl; ++k)
        if (cache.pre[k].cols != params.layers[k].out_dim() || cache.pre[k].rows != cache.input.rows)
            throw std::logic_error("mlp_backward: cache does not match the network");
    if (!d_output.same_shape(cache.output()))
        throw std::invalid_argument("mlp_backward: upstream gradient shape mismatch");

    LayerSet grads(nl);
    Matrix delta = d_output;
    if (params.output_activation == OutputActivation::sigmoid) {
        const auto& y = cache.output().data;
        for (std::size_t i = 0; i < delta.data.size(); ++i)
            delta.data[i] *= y[i] * (1.0 - y[i]);
    }

    for (std::size_t kk = nl; kk-- > 0;) {
        const Matrix& x = kk == 0 ? cache.input : cache.post[kk - 1];
        grads[kk].weight = kernels::matmul(transpose(delta), x);
        grads[kk].bias = kernels::column_sums(delta);
        if (kk == 0)
            break;
        Matrix d_prev = kernels::matmul(delta, params.layers[kk].weight);
        const auto& z_prev = cache.pre[kk - 1].data;
        for (std::size_t i = 0; i < d_prev.data.size(); ++i)
            if (!(z_prev[i] > 0.0))
                d_prev.data[i] = 0.0;
        delta = std::move(d_prev);
    }
    return grads;
}

void save_params(const MlpParams& params, const std::filesystem::path& path)
{
    nlohmann::json header;
    header["format"] = "sape-mlp";
    header["hidden_width"] = params.hidden_width;
    header["depth"] = params.depth;
    header["output_dim"] = params.output_dim;
    header["output_activation"] = to_string(params.output_activation);
    header["layers"] = nlohmann::json::array();
    std::vector<double> payload;
    payload.reserve(params.parameter_count());
    for (const auto& l : params.layers) {
        header["layers"].push_back({l.out_dim(), l.in_dim()});
        payload.insert(payload.end(), l.weight.data.begin(), l.weight.data.end());
        payload.insert(payload.end(), l.bias.begin(), l.bias.end());
    }
    io::write_blob(path, header, payload);
}

MlpParams load_params(const std::filesystem::path& path)
{
    const auto blob = io::read_blob(path);
    const auto& h = blob.header;
    if (h.value("format", "") != "sape-mlp")
        throw std::runtime_error("load_params: not an MLP checkpoint: " + path.string());
    MlpParams p;
    p.hidden_width = h.at("hidden_width").get<std::size_t>();
    p.depth = h.at("depth").get<std::size_t>();
    p.output_dim = h.at("output_dim").get<std::size_t>();
    p.output_activation = output_activation_from_string(h.at("output_activation").get<std::string>());
    std::size_t offset = 0;
    for (const auto& shape : h.at("layers")) {
        const auto out = shape.at(0).get<std::size_t>();
        const auto in = shape.at(1).get<std::size_t>();
        if (offset + out * in + out > blob.payload.size())
            throw std::runtime_error("load_params: truncated payload in " + path.string());
        DenseLayer l{Matrix(out, in), std::vector<double>(out)};
        std::copy_n(blob.payload.begin() + static_cast<std::ptrdiff_t>(offset), out * in, l.weight.data.begin());
        offset += out * in;
        std::copy_n(blob.payload.begin() + static_cast<std::ptrdiff_t>(offset), out, l.bias.begin());
        offset += out;
        p.layers.push_back(std::move(l));
    }
    for (std::size_t k = 0; k + 1 < p.layers.size(); ++k)
        if (p.layers[k].out_dim() != p.layers[k + 1].in_dim())
            throw std::runtime_error("load_params: layer shapes do not chain");
    if (offset != blob.payload.size())
        throw std::runtime_error("load_params: trailing payload in " + path.string());
    return p;
}

} // namespace sape::nn
