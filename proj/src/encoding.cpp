#include "sape/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sape/blob.hpp"

namespace sape::enc {

std::string to_string(EncodingKind k)
{
    switch (k) {
    case EncodingKind::identity_only: return "none";
    case EncodingKind::fourier: return "fourier";
    case EncodingKind::rbf_grid: return "rbf";
    }
    return "none";
}

EncodingKind encoding_kind_from_string(const std::string& s)
{
    if (s == "none" || s == "identity")
        return EncodingKind::identity_only;
    if (s == "fourier" || s == "ff")
        return EncodingKind::fourier;
    if (s == "rbf" || s == "rbf_grid")
        return EncodingKind::rbf_grid;
    throw std::invalid_argument("unknown encoding: " + s);
}

EncodingBasis identity_basis(std::size_t d)
{
    if (d == 0)
        throw std::invalid_argument("identity_basis: d must be >= 1");
    EncodingBasis b;
    b.kind = EncodingKind::identity_only;
    b.dim = d;
    b.group_ids.assign(d, 0);
    b.lipschitz_keys = {0.0};
    return b;
}

EncodingBasis fourier_basis_from(Matrix frequencies)
{
    if (frequencies.cols == 0)
        throw std::invalid_argument("fourier_basis_from: frequencies need at least one column");
    EncodingBasis b = identity_basis(frequencies.cols);
    b.kind = EncodingKind::fourier;
    for (std::size_t i = 0; i < frequencies.rows; ++i) {
        double n2 = 0.0;
        for (double v : frequencies.row(i))
            n2 += v * v;
        b.lipschitz_keys.push_back(std::sqrt(n2));
        b.group_ids.push_back(i + 1);
        b.group_ids.push_back(i + 1);
    }
    b.frequencies = std::move(frequencies);
    return b;
}

EncodingBasis sample_fourier_basis(std::size_t d, std::size_t num_frequencies, double sigma, std::uint64_t seed)
{
    if (d == 0)
        throw std::invalid_argument("sample_fourier_basis: d must be >= 1");
    if (num_frequencies == 0)
        throw std::invalid_argument("sample_fourier_basis: need at least one frequency");
    if (!(sigma > 0.0))
        throw std::invalid_argument("sample_fourier_basis: sigma must be > 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    Matrix freqs(num_frequencies, d);
    for (double& v : freqs.data)
        v = normal(rng);

    EncodingBasis b = fourier_basis_from(std::move(freqs));
    b = reorder_groups(b, lipschitz_order(b));
    b.sigma = sigma;
    b.seed = seed;
    return b;
}

namespace {

std::vector<double> lattice_axis(std::size_t count, double lo, double hi)
{
    std::vector<double> axis(count);
    if (count == 1) {
        axis[0] = 0.5 * (lo + hi);
        return axis;
    }
    for (std::size_t i = 0; i < count; ++i)
        axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return axis;
}

} // namespace

EncodingBasis build_rbf_grid_basis(std::size_t d, std::span<const RbfTier> tiers, const Domain& domain)
{
    if (d == 0 || domain.dim() != d)
        throw std::invalid_argument("build_rbf_grid_basis: domain dimension must equal d >= 1");
    if (tiers.empty())
        throw std::invalid_argument("build_rbf_grid_basis: need at least one tier");
    for (const auto& t : tiers) {
        if (t.grid_per_axis < 1)
            throw std::invalid_argument("build_rbf_grid_basis: grid_per_axis must be >= 1");
        if (!(t.bandwidth > 0.0))
            throw std::invalid_argument("build_rbf_grid_basis: bandwidth must be > 0");
    }

    std::vector<RbfTier> sorted(tiers.begin(), tiers.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RbfTier& a, const RbfTier& b) { return 1.0 / a.bandwidth < 1.0 / b.bandwidth; });

    EncodingBasis b = identity_basis(d);
    b.kind = EncodingKind::rbf_grid;
    std::size_t total = 0;
    for (const auto& t : sorted) {
        std::size_t c = 1;
        for (std::size_t a = 0; a < d; ++a)
            c *= t.grid_per_axis;
        total += c;
    }
    b.centers = Matrix(total, d);

    std::size_t row = 0;
    for (std::size_t g = 0; g < sorted.size(); ++g) {
        const auto& t = sorted[g];
        std::vector<std::vector<double>> axes;
        for (std::size_t a = 0; a < d; ++a)
            axes.push_back(lattice_axis(t.grid_per_axis, domain.lo[a], domain.hi[a]));
        std::vector<std::size_t> idx(d, 0);
        bool done = false;
        while (!done) {
            // first axis varies fastest
            for (std::size_t a = 0; a < d; ++a)
                b.centers(row, a) = axes[a][idx[a]];
            b.bandwidths.push_back(t.bandwidth);
            b.group_ids.push_back(g + 1);
            ++row;
            std::size_t a = 0;
            for (; a < d; ++a) {
                if (++idx[a] < t.grid_per_axis)
                    break;
                idx[a] = 0;
            }
            done = a == d;
        }
        b.lipschitz_keys.push_back(1.0 / t.bandwidth);
    }
    return b;
}

EncodingBasis build_rbf_grid_basis(std::size_t d, std::size_t grid_per_axis, double bandwidth, const Domain& domain)
{
    const RbfTier tier{grid_per_axis, bandwidth};
    return build_rbf_grid_basis(d, std::span<const RbfTier>(&tier, 1), domain);
}

std::vector<std::size_t> lipschitz_order(const EncodingBasis& basis)
{
    std::vector<std::size_t> order(basis.lipschitz_keys.size());
    std::iota(order.begin(), order.end(), 0);
    if (order.size() > 1)
        std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
            return basis.lipschitz_keys[a] < basis.lipschitz_keys[b];
        });
    return order;
}

EncodingBasis reorder_groups(const EncodingBasis& basis, std::span<const std::size_t> order)
{
    const std::size_t ng = basis.lipschitz_keys.size();
    if (order.size() != ng || (ng > 0 && order[0] != 0))
        throw std::invalid_argument("reorder_groups: order must be a permutation keeping the identity group first");
    std::vector<bool> seen(ng, false);
    for (auto g : order) {
        if (g >= ng || seen[g])
            throw std::invalid_argument("reorder_groups: not a permutation");
        seen[g] = true;
    }

    EncodingBasis out = identity_basis(basis.dim);
    out.kind = basis.kind;
    out.sigma = basis.sigma;
    out.seed = basis.seed;

    if (basis.kind == EncodingKind::fourier) {
        out.frequencies = Matrix(basis.frequencies.rows, basis.frequencies.cols);
        for (std::size_t pos = 1; pos < ng; ++pos) {
            const std::size_t src = order[pos] - 1;
            auto from = basis.frequencies.row(src);
            std::copy(from.begin(), from.end(), out.frequencies.row(pos - 1).begin());
            out.lipschitz_keys.push_back(basis.lipschitz_keys[order[pos]]);
            out.group_ids.push_back(pos);
            out.group_ids.push_back(pos);
        }
    } else if (basis.kind == EncodingKind::rbf_grid) {
        out.centers = Matrix(basis.centers.rows, basis.centers.cols);
        std::size_t row = 0;
        for (std::size_t pos = 1; pos < ng; ++pos) {
            for (std::size_t c = 0; c < basis.centers.rows; ++c) {
                if (basis.group_ids[basis.dim + c] != order[pos])
                    continue;
                auto from = basis.centers.row(c);
                std::copy(from.begin(), from.end(), out.centers.row(row).begin());
                out.bandwidths.push_back(basis.bandwidths[c]);
                out.group_ids.push_back(pos);
                ++row;
            }
            out.lipschitz_keys.push_back(basis.lipschitz_keys[order[pos]]);
        }
    }
    return out;
}

namespace {

void encode_into(const EncodingBasis& basis, const double* p, double* out)
{
    const std::size_t d = basis.dim;
    for (std::size_t i = 0; i < d; ++i)
        out[i] = p[i];
    if (basis.kind == EncodingKind::fourier) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t f = 0; f < basis.frequencies.rows; ++f) {
            const double* b = basis.frequencies.data.data() + f * d;
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                dot += b[i] * p[i];
            const double phase = two_pi * dot;
            out[d + 2 * f] = std::cos(phase);
            out[d + 2 * f + 1] = std::sin(phase);
        }
    } else if (basis.kind == EncodingKind::rbf_grid) {
        for (std::size_t c = 0; c < basis.centers.rows; ++c) {
            const double* center = basis.centers.data.data() + c * d;
            double r2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double diff = p[i] - center[i];
                r2 += diff * diff;
            }
            const double h = basis.bandwidths[c];
            out[d + c] = std::exp(-r2 / (2.0 * h * h));
        }
    }
}

} // namespace

std::vector<double> encode(const EncodingBasis& basis, std::span<const double> p)
{
    if (p.size() != basis.dim)
        throw std::invalid_argument("encode: point has " + std::to_string(p.size()) + " coordinates, basis expects " +
                                    std::to_string(basis.dim));
    std::vector<double> out(basis.output_dim());
    encode_into(basis, p.data(), out.data());
    return out;
}

Matrix encode_batch(const EncodingBasis& basis, const Matrix& coords)
{
    if (coords.cols != basis.dim)
        throw std::invalid_argument("encode_batch: coordinate width does not match basis dimension");
    Matrix out(coords.rows, basis.output_dim());
    const auto n = static_cast<std::ptrdiff_t>(coords.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        encode_into(basis, coords.data.data() + r * coords.cols, out.data.data() + r * out.cols);
    }
    return out;
}

void save_basis(const EncodingBasis& basis, const std::filesystem::path& path)
{
    nlohmann::json h;
    h["format"] = "sape-basis";
    h["kind"] = to_string(basis.kind);
    h["d"] = basis.dim;
    h["n"] = basis.output_dim();
    h["sigma"] = basis.sigma;
    h["seed"] = basis.seed;
    std::vector<double> payload;
    if (basis.kind == EncodingKind::fourier) {
        h["num_frequencies"] = basis.frequencies.rows;
        payload = basis.frequencies.data;
    } else if (basis.kind == EncodingKind::rbf_grid) {
        h["num_centers"] = basis.centers.rows;
        std::vector<std::size_t> groups(basis.group_ids.begin() + static_cast<std::ptrdiff_t>(basis.dim),
                                        basis.group_ids.end());
        h["center_groups"] = groups;
        h["lipschitz_keys"] = basis.lipschitz_keys;
        payload = basis.centers.data;
        payload.insert(payload.end(), basis.bandwidths.begin(), basis.bandwidths.end());
    }
    io::write_blob(path, h, payload);
}

EncodingBasis load_basis(const std::filesystem::path& path)
{
    const auto blob = io::read_blob(path);
    const auto& h = blob.header;
    if (h.value("format", "") != "sape-basis")
        throw std::runtime_error("load_basis: not a basis file: " + path.string());
    const auto kind = encoding_kind_from_string(h.at("kind").get<std::string>());
    const auto d = h.at("d").get<std::size_t>();

    EncodingBasis b;
    if (kind == EncodingKind::fourier) {
        const auto nf = h.at("num_frequencies").get<std::size_t>();
        if (blob.payload.size() != nf * d)
            throw std::runtime_error("load_basis: payload size mismatch");
        Matrix f(nf, d);
        f.data = blob.payload;
        b = fourier_basis_from(std::move(f));
    } else if (kind == EncodingKind::rbf_grid) {
        const auto nc = h.at("num_centers").get<std::size_t>();
        if (blob.payload.size() != nc * d + nc)
            throw std::runtime_error("load_basis: payload size mismatch");
        b = identity_basis(d);
        b.kind = kind;
        b.centers = Matrix(nc, d);
        std::copy_n(blob.payload.begin(), nc * d, b.centers.data.begin());
        b.bandwidths.assign(blob.payload.begin() + static_cast<std::ptrdiff_t>(nc * d), blob.payload.end());
        for (auto g : h.at("center_groups"))
            b.group_ids.push_back(g.get<std::size_t>());
        b.lipschitz_keys = h.at("lipschitz_keys").get<std::vector<double>>();
    } else {
        b = identity_basis(d);
    }
    b.sigma = h.at("sigma").get<double>();
    b.seed = h.at("seed").get<std::uint64_t>();
    if (b.output_dim() != h.at("n").get<std::size_t>())
        throw std::runtime_error("load_basis: output dimension mismatch");
    return b;
}

} // namespace sape::enc
