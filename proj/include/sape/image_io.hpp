#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "sape/matrix.hpp"

namespace sape::io {

/// Interleaved image with values in [0, 1]; row 0 is the top row.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(std::size_t w, std::size_t h, std::size_t c, double fill = 0.0)
        : width(w), height(h), channels(c), data(w * h * c, fill) {}

    double& at(std::size_t x, std::size_t y, std::size_t c) { return data[(y * width + x) * channels + c]; }
    double at(std::size_t x, std::size_t y, std::size_t c) const { return data[(y * width + x) * channels + c]; }

    friend bool operator==(const Image&, const Image&) = default;
};

/// PNG (8-bit gray/RGB, alpha dropped) or binary/ASCII PGM/PPM, chosen by content.
Image read_image(const std::filesystem::path& path);

/// Format chosen by extension: .png, .pgm (1 channel), .ppm (3 channels).
/// Values are clamped to [0,1] and quantized to 8 bits.
void write_image(const Image& image, const std::filesystem::path& path);

/// Grayscale image from a scalar field laid out row-major with row 0 at
/// the bottom (as produced by grids and rasters), linearly mapped from
/// [lo, hi] to [0, 1].
Image scalar_field_image(std::span<const double> values, std::size_t width, std::size_t height, double lo, double hi);

/// Whitespace-separated points, one per line; blank lines and '#' comments skipped.
Matrix read_points(const std::filesystem::path& path);
void write_points(const Matrix& points, const std::filesystem::path& path);

} // namespace sape::io
