#pragma once

#include <memory>
#include <string>

#include "sape/geometry.hpp"
#include "sape/image_io.hpp"
#include "sape/matrix.hpp"

// Synthetic inputs used by the tests, the acceptance suite and the CLI
// (`--input fixture:<name>`).
namespace sape::fixtures {

/// RGB image: smooth colour gradient on the left half, checkerboard with
/// `cell`-pixel squares on the right half.
io::Image two_tone_image(std::size_t size = 64, std::size_t cell = 4);

io::Image constant_image(std::size_t size, double r, double g, double b);

/// 1D regression data on [0, 1]. Targets are one column.
struct Signal1D {
    Matrix train_x, train_y;
    Matrix eval_x, eval_y;
    double split = 0.5;  // left / right region boundary
};

/// Low-frequency sine on [0, 0.5), linear chirp on [0.5, 1]. Continuous at
/// the boundary.
Signal1D piecewise_signal(std::size_t train_samples = 512, std::size_t eval_samples = 4096);
double piecewise_signal_value(double x);

/// sin(2 pi x) on [0, 1].
Signal1D sine_signal(std::size_t train_samples = 512, std::size_t eval_samples = 4096);

// Closed polygons (N x 2, counter-clockwise), contained in [-1, 1]^2.
Matrix circle_polygon(std::size_t vertices = 256, double radius = 1.0);
Matrix square_polygon(double half_side = 0.8);
Matrix star_polygon(std::size_t points = 5, double outer = 0.9, double inner = 0.4);
Matrix gear_polygon(std::size_t teeth = 16, double root = 0.6, double tip = 0.8);

/// "two-tone", "two-tone-32", "constant".
io::Image image_fixture(const std::string& name);
/// "sine", "piecewise".
Signal1D signal_fixture(const std::string& name);
/// "circle", "square", "star", "gear".
Matrix polygon_fixture(const std::string& name);
/// "circle", "gear", "square", "star" (2D polygons) or "sphere" (3D mesh).
std::unique_ptr<geom::Shape> shape_fixture(const std::string& name);

} // namespace sape::fixtures
