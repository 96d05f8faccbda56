#include "sape/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sape/blob.hpp"

namespace sape::mask {

MaskSchedule make_schedule(double total_iterations, std::size_t n_groups, std::size_t dim)
{
    if (!(total_iterations > 0.0))
        throw std::invalid_argument("make_schedule: T must be > 0");
    MaskSchedule s;
    s.total_iterations = total_iterations;
    s.n_groups = n_groups;
    s.dim = dim;
    s.tau = total_iterations / (2.0 * static_cast<double>(std::max<std::size_t>(n_groups, 1)));
    return s;
}

double schedule_alpha(const MaskSchedule& schedule, double clock, std::size_t g)
{
    if (g < 1)
        throw std::invalid_argument("schedule_alpha: group index must be >= 1");
    if (!(clock >= 0.0))
        throw std::invalid_argument("schedule_alpha: clock must be >= 0");
    const double x = (clock - schedule.tau * static_cast<double>(g - 1)) / schedule.tau;
    return std::clamp(x, 0.0, 1.0);
}

std::vector<double> group_alpha(const MaskSchedule& schedule, double clock)
{
    std::vector<double> out(schedule.n_groups + 1, 0.0);
    out[0] = 1.0;
    for (std::size_t g = 1; g <= schedule.n_groups; ++g)
        out[g] = schedule_alpha(schedule, clock, g);
    return out;
}

std::vector<double> expand_groups(const enc::EncodingBasis& basis, std::span<const double> group_values)
{
    if (group_values.size() != basis.num_groups() + 1)
        throw std::invalid_argument("expand_groups: group count mismatch");
    std::vector<double> out(basis.output_dim());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = group_values[basis.group_ids[i]];
    return out;
}

std::vector<double> node_alpha(const MaskSchedule& schedule, const enc::EncodingBasis& basis, double clock)
{
    return expand_groups(basis, group_alpha(schedule, clock));
}

std::vector<double> MaskGrid::node_position(std::size_t node) const
{
    std::vector<double> p(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        const std::size_t i = node % resolution[a];
        node /= resolution[a];
        p[a] = resolution[a] == 1
                   ? 0.5 * (domain.lo[a] + domain.hi[a])
                   : domain.lo[a] + (domain.hi[a] - domain.lo[a]) * static_cast<double>(i) /
                                        static_cast<double>(resolution[a] - 1);
    }
    return p;
}

double MaskGrid::node_loss(std::size_t node) const
{
    if (!(loss_den[node] > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return loss_num[node] / loss_den[node];
}

double MaskGrid::mean_clock() const
{
    double s = 0.0;
    for (double c : clocks)
        s += c;
    return clocks.empty() ? 0.0 : s / static_cast<double>(clocks.size());
}

MaskGrid make_grid(std::vector<std::size_t> resolution, Domain domain, double epsilon, std::size_t feedback_interval)
{
    if (resolution.empty() || resolution.size() != domain.dim())
        throw std::invalid_argument("make_grid: resolution and domain dimension differ");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("make_grid: epsilon must be > 0");
    if (feedback_interval < 1)
        throw std::invalid_argument("make_grid: feedback interval must be >= 1");
    std::size_t nodes = 1;
    for (auto r : resolution) {
        if (r < 1)
            throw std::invalid_argument("make_grid: resolution must be >= 1 per axis");
        nodes *= r;
    }
    for (std::size_t a = 0; a < domain.dim(); ++a)
        if (!(domain.hi[a] > domain.lo[a]))
            throw std::invalid_argument("make_grid: empty domain");

    MaskGrid g;
    g.resolution = std::move(resolution);
    g.domain = std::move(domain);
    g.clocks.assign(nodes, 0.0);
    g.frozen.assign(nodes, 0);
    g.loss_num.assign(nodes, 0.0);
    g.loss_den.assign(nodes, 0.0);
    g.epsilon = epsilon;
    g.feedback_interval = feedback_interval;
    return g;
}

std::vector<Neighbor> interp_weights(const MaskGrid& grid, std::span<const double> p)
{
    const std::size_t d = grid.dim();
    if (p.size() != d)
        throw std::invalid_argument("interp_weights: point dimension mismatch");

    std::vector<std::size_t> base(d, 0);
    std::vector<double> frac(d, 0.0);
    std::vector<std::size_t> active;
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t r = grid.resolution[a];
        if (r == 1)
            continue;
        const double span = grid.domain.hi[a] - grid.domain.lo[a];
        double t = (p[a] - grid.domain.lo[a]) / span * static_cast<double>(r - 1);
        if (!(t > 0.0))
            t = 0.0;  // also maps NaN onto the boundary
        t = std::min(t, static_cast<double>(r - 1));
        std::size_t i0 = static_cast<std::size_t>(std::floor(t));
        i0 = std::min(i0, r - 2);
        base[a] = i0;
        frac[a] = t - static_cast<double>(i0);
        active.push_back(a);
    }

    std::vector<std::size_t> stride(d, 1);
    for (std::size_t a = 1; a < d; ++a)
        stride[a] = stride[a - 1] * grid.resolution[a - 1];
    std::size_t origin = 0;
    for (std::size_t a = 0; a < d; ++a)
        origin += base[a] * stride[a];

    const std::size_t corners = std::size_t{1} << active.size();
    std::vector<Neighbor> out;
    out.reserve(corners);
    for (std::size_t mask = 0; mask < corners; ++mask) {
        std::size_t node = origin;
        double w = 1.0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const std::size_t a = active[k];
            if (mask & (std::size_t{1} << k)) {
                node += stride[a];
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        out.push_back({node, w});
    }
    return out;
}

void blend_group_alpha(const MaskGrid& grid, const MaskSchedule& schedule, std::span<const Neighbor> neighbors,
                       std::span<double> out)
{
    if (out.size() != schedule.n_groups + 1)
        throw std::invalid_argument("blend_group_alpha: output size must be n_groups + 1");
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    const double tau = schedule.tau;
    for (const auto& nb : neighbors) {
        if (nb.weight == 0.0)
            continue;
        const double clock = grid.clocks[nb.node];
        // Groups past the ramp front contribute 0; stop there.
        for (std::size_t g = 1; g <= schedule.n_groups; ++g) {
            const double x = (clock - tau * static_cast<double>(g - 1)) / tau;
            if (x <= 0.0)
                break;
            out[g] += nb.weight * (x < 1.0 ? x : 1.0);
        }
    }
}

std::vector<double> interp_alpha(const MaskGrid& grid, const MaskSchedule& schedule, const enc::EncodingBasis& basis,
                                 std::span<const double> p)
{
    if (schedule.n_groups != basis.num_groups())
        throw std::invalid_argument("interp_alpha: schedule and basis disagree on the group count");
    const auto nb = interp_weights(grid, p);
    std::vector<double> groups(schedule.n_groups + 1);
    blend_group_alpha(grid, schedule, nb, groups);
    return expand_groups(basis, groups);
}

void accumulate_loss(MaskGrid& grid, std::span<const Neighbor> neighbors, double loss)
{
    if (!(loss >= 0.0) || !std::isfinite(loss))
        throw std::logic_error("accumulate_loss: per-sample loss must be finite and >= 0");
    for (const auto& nb : neighbors) {
        grid.loss_num[nb.node] += nb.weight * loss;
        grid.loss_den[nb.node] += nb.weight;
    }
}

void accumulate_loss(MaskGrid& grid, std::span<const double> p, double loss)
{
    const auto nb = interp_weights(grid, p);
    accumulate_loss(grid, nb, loss);
}

std::size_t advance(MaskGrid& grid)
{
    std::size_t advanced = 0;
    const double step = static_cast<double>(grid.feedback_interval);
    for (std::size_t u = 0; u < grid.node_count(); ++u) {
        if (grid.loss_den[u] > 0.0) {
            const double loss = grid.loss_num[u] / grid.loss_den[u];
            if (loss >= grid.epsilon) {
                grid.frozen[u] = 0;
                grid.clocks[u] += step;
                ++advanced;
            } else {
                grid.frozen[u] = 1;
            }
        }
        grid.loss_num[u] = 0.0;
        grid.loss_den[u] = 0.0;
    }
    return advanced;
}

std::vector<double> heatmap(const MaskGrid& grid, const MaskSchedule& schedule, const enc::EncodingBasis& basis)
{
    if (schedule.n_groups != basis.num_groups())
        throw std::invalid_argument("heatmap: schedule and basis disagree on the group count");
    std::vector<double> out(grid.node_count(), 0.0);
    for (std::size_t u = 0; u < grid.node_count(); ++u) {
        const auto ga = group_alpha(schedule, grid.clocks[u]);
        for (std::size_t g = schedule.n_groups; g >= 1; --g) {
            if (ga[g] > 0.5) {
                out[u] = basis.lipschitz_keys[g];
                break;
            }
        }
    }
    return out;
}

void save_grid(const MaskGrid& grid, const MaskSchedule& schedule, const std::filesystem::path& path)
{
    nlohmann::json h;
    h["format"] = "sape-grid";
    h["resolution"] = grid.resolution;
    h["domain_lo"] = grid.domain.lo;
    h["domain_hi"] = grid.domain.hi;
    h["epsilon"] = grid.epsilon;
    h["feedback_interval"] = grid.feedback_interval;
    h["T"] = schedule.total_iterations;
    h["n_groups"] = schedule.n_groups;
    h["d"] = schedule.dim;
    h["frozen"] = grid.frozen;
    io::write_blob(path, h, grid.clocks);
}

LoadedGrid load_grid(const std::filesystem::path& path)
{
    const auto blob = io::read_blob(path);
    const auto& h = blob.header;
    if (h.value("format", "") != "sape-grid")
        throw std::runtime_error("load_grid: not a grid file: " + path.string());
    LoadedGrid out;
    out.grid = make_grid(h.at("resolution").get<std::vector<std::size_t>>(),
                         Domain{h.at("domain_lo").get<std::vector<double>>(), h.at("domain_hi").get<std::vector<double>>()},
                         h.at("epsilon").get<double>(), h.at("feedback_interval").get<std::size_t>());
    if (blob.payload.size() != out.grid.node_count())
        throw std::runtime_error("load_grid: clock count mismatch in " + path.string());
    out.grid.clocks = blob.payload;
    if (h.contains("frozen"))
        out.grid.frozen = h.at("frozen").get<std::vector<std::uint8_t>>();
    if (out.grid.frozen.size() != out.grid.node_count())
        throw std::runtime_error("load_grid: frozen flag count mismatch in " + path.string());
    out.schedule = make_schedule(h.at("T").get<double>(), h.at("n_groups").get<std::size_t>(), h.at("d").get<std::size_t>());
    return out;
}

} // namespace sape::mask
