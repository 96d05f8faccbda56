#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "sape/matrix.hpp"

namespace sape::metrics {

struct MetricResult {
    std::string name;
    double value = 0.0;
    std::string support;  // what the metric was evaluated on
};

inline constexpr double kPsnrCap = 100.0;

double mse(std::span<const double> a, std::span<const double> b);

/// 10 log10(1 / mse) for values on a unit range, capped at 100 dB.
/// Throws std::invalid_argument on size mismatch or empty input.
double psnr(std::span<const double> predicted, std::span<const double> reference);

/// |A and B| / |A or B|; two empty masks give 1.
double iou(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> reference);

/// Mean squared nearest-neighbour distance from a to b plus from b to a.
/// Throws std::invalid_argument if either set is empty or widths differ.
double chamfer_symmetric(const Matrix& a, const Matrix& b);

} // namespace sape::metrics
