#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sape/domain.hpp"
#include "sape/matrix.hpp"

namespace sape::enc {

enum class EncodingKind { identity_only, fourier, rbf_grid };

std::string to_string(EncodingKind k);
EncodingKind encoding_kind_from_string(const std::string& s);

/// Positional encoding E(p) = (e_1(p), ..., e_n(p)).
///
/// Output layout: the first `dim` entries are the coordinates themselves
/// (group 0). A Fourier basis then appends one (cos, sin) pair per frequency;
/// an RBF basis appends one Gaussian bump per lattice center. Every output
/// entry belongs to a progression group; `lipschitz_keys[g]` is the ordering
/// key of group g, non-decreasing in g, with `lipschitz_keys[0] == 0` for the
/// identity group.
struct EncodingBasis {
    EncodingKind kind = EncodingKind::identity_only;
    std::size_t dim = 0;
    double sigma = 0.0;         // Fourier sampling scale
    std::uint64_t seed = 0;     // Fourier sampling seed

    Matrix frequencies;                // Fourier: one row b_i per frequency
    Matrix centers;                    // RBF: one row per center
    std::vector<double> bandwidths;    // RBF: per center

    std::vector<std::size_t> group_ids;     // per output entry
    std::vector<double> lipschitz_keys;     // per group, group 0 = identity

    std::size_t output_dim() const { return group_ids.size(); }
    /// Number of non-identity groups.
    std::size_t num_groups() const { return lipschitz_keys.empty() ? 0 : lipschitz_keys.size() - 1; }

    friend bool operator==(const EncodingBasis&, const EncodingBasis&) = default;
};

EncodingBasis identity_basis(std::size_t d);

/// b_i ~ N(0, sigma^2 I) i.i.d., then sorted by ||b_i|| (stable).
EncodingBasis sample_fourier_basis(std::size_t d, std::size_t num_frequencies, double sigma, std::uint64_t seed);

/// Builds a Fourier basis from an explicit frequency table, keeping its order.
/// Keys are ||b_i||; call `lipschitz_order` + `reorder_groups` to sort.
EncodingBasis fourier_basis_from(Matrix frequencies);

struct RbfTier {
    std::size_t grid_per_axis = 1;
    double bandwidth = 1.0;
};

/// Gaussian bumps exp(-|p - c|^2 / (2 h^2)) centered on a regular lattice
/// spanning `domain` (a single center sits at the middle of an axis with one
/// lattice point). Each tier is one group with key 1/h; tiers are sorted by
/// key.
EncodingBasis build_rbf_grid_basis(std::size_t d, std::span<const RbfTier> tiers, const Domain& domain);
EncodingBasis build_rbf_grid_basis(std::size_t d, std::size_t grid_per_axis, double bandwidth, const Domain& domain);

/// Stable permutation of group indices by ascending key. Entry i names the
/// group that should sit at position i; the identity group stays first.
std::vector<std::size_t> lipschitz_order(const EncodingBasis& basis);

/// Returns `basis` with its groups rearranged by `order` (as produced by
/// `lipschitz_order`).
EncodingBasis reorder_groups(const EncodingBasis& basis, std::span<const std::size_t> order);

/// E(p). Throws std::invalid_argument if p has the wrong length.
std::vector<double> encode(const EncodingBasis& basis, std::span<const double> p);

/// Encodes every row of `coords` (parallel over rows).
Matrix encode_batch(const EncodingBasis& basis, const Matrix& coords);

void save_basis(const EncodingBasis& basis, const std::filesystem::path& path);
EncodingBasis load_basis(const std::filesystem::path& path);

} // namespace sape::enc
