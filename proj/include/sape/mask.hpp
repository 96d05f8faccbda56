#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sape/domain.hpp"
#include "sape/encoding.hpp"

namespace sape::mask {

/// Linear, sequential reveal of encoding groups.
///
/// Group g (1-based, in ascending Lipschitz order) ramps from 0 to 1 over
/// the clock interval [tau*(g-1), tau*g], with tau = T / (2 * n_groups), so
/// every group is fully on once the clock reaches T/2. Identity entries are
/// always 1.
struct MaskSchedule {
    double total_iterations = 0.0;  // T
    std::size_t n_groups = 0;
    std::size_t dim = 0;            // identity entries
    double tau = 0.0;

    double saturation_clock() const { return tau * static_cast<double>(n_groups); }
};

MaskSchedule make_schedule(double total_iterations, std::size_t n_groups, std::size_t dim);

/// clamp((clock - tau*(g-1)) / tau, 0, 1). Throws for g < 1 or clock < 0.
double schedule_alpha(const MaskSchedule& schedule, double clock, std::size_t g);

/// Per-group values at one clock: entry 0 is the identity group (always 1).
std::vector<double> group_alpha(const MaskSchedule& schedule, double clock);

/// Expands per-group values to one value per encoding output entry.
std::vector<double> expand_groups(const enc::EncodingBasis& basis, std::span<const double> group_values);

/// Full mask vector of a node at `clock`.
std::vector<double> node_alpha(const MaskSchedule& schedule, const enc::EncodingBasis& basis, double clock);

struct Neighbor {
    std::size_t node;
    double weight;
};

/// Regular lattice of progression clocks over a domain, plus the loss
/// accumulators of the current feedback window.
///
/// Node coordinates along axis a are linspace(lo[a], hi[a], resolution[a]);
/// a single node along an axis covers the whole axis. Node index is
/// row-major with the first axis varying fastest.
struct MaskGrid {
    std::vector<std::size_t> resolution;
    Domain domain;
    std::vector<double> clocks;
    std::vector<std::uint8_t> frozen;
    std::vector<double> loss_num;
    std::vector<double> loss_den;
    double epsilon = 1e-3;
    std::size_t feedback_interval = 1;

    std::size_t dim() const { return resolution.size(); }
    std::size_t node_count() const { return clocks.size(); }
    std::vector<double> node_position(std::size_t node) const;
    /// Weighted mean loss of the current window; NaN when nothing landed on the node.
    double node_loss(std::size_t node) const;
    double mean_clock() const;
};

MaskGrid make_grid(std::vector<std::size_t> resolution, Domain domain, double epsilon, std::size_t feedback_interval = 1);

/// Multilinear interpolation weights of p over the surrounding cell (2^k
/// entries for k axes with resolution > 1, zero weights included). Points
/// outside the domain are clamped onto its boundary.
std::vector<Neighbor> interp_weights(const MaskGrid& grid, std::span<const double> p);

/// Per-group mask at p: sum_u w_u * group_alpha(clock_u).
void blend_group_alpha(const MaskGrid& grid, const MaskSchedule& schedule, std::span<const Neighbor> neighbors,
                       std::span<double> out);

/// alpha(t, p) over all encoding entries.
std::vector<double> interp_alpha(const MaskGrid& grid, const MaskSchedule& schedule, const enc::EncodingBasis& basis,
                                 std::span<const double> p);

/// Scatters one sample's loss onto its neighbors. Throws std::logic_error for
/// a negative or non-finite loss.
void accumulate_loss(MaskGrid& grid, std::span<const Neighbor> neighbors, double loss);
void accumulate_loss(MaskGrid& grid, std::span<const double> p, double loss);

/// Feedback step: each node that received samples advances its clock by
/// `feedback_interval` if its window loss is >= epsilon, otherwise holds and
/// is marked frozen (until a later window's loss is >= epsilon again).
/// Nodes without samples are left alone. Clears the accumulators and returns
/// the number of nodes that advanced.
std::size_t advance(MaskGrid& grid);

/// Per node, the largest Lipschitz key among groups with alpha > 0.5 (0 if
/// only the identity is exposed).
std::vector<double> heatmap(const MaskGrid& grid, const MaskSchedule& schedule, const enc::EncodingBasis& basis);

void save_grid(const MaskGrid& grid, const MaskSchedule& schedule, const std::filesystem::path& path);

struct LoadedGrid {
    MaskGrid grid;
    MaskSchedule schedule;
};
LoadedGrid load_grid(const std::filesystem::path& path);

} // namespace sape::mask
