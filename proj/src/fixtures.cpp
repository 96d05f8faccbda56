#include "sape/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sape::fixtures {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix polar_polygon(const std::vector<std::pair<double, double>>& radius_angle)
{
    Matrix m(radius_angle.size(), 2);
    for (std::size_t i = 0; i < radius_angle.size(); ++i) {
        const auto [r, a] = radius_angle[i];
        m(i, 0) = r * std::cos(a);
        m(i, 1) = r * std::sin(a);
    }
    return m;
}

Signal1D sample_signal(double (*f)(double), std::size_t train_samples, std::size_t eval_samples)
{
    if (train_samples < 2 || eval_samples < 1)
        throw std::invalid_argument("signal fixture needs >= 2 training and >= 1 evaluation samples");
    Signal1D s;
    s.train_x = Matrix(train_samples, 1);
    s.train_y = Matrix(train_samples, 1);
    for (std::size_t i = 0; i < train_samples; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(train_samples - 1);
        s.train_x(i, 0) = x;
        s.train_y(i, 0) = f(x);
    }
    // midpoints of an even partition: none coincide with a training sample
    s.eval_x = Matrix(eval_samples, 1);
    s.eval_y = Matrix(eval_samples, 1);
    for (std::size_t i = 0; i < eval_samples; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(eval_samples);
        s.eval_x(i, 0) = x;
        s.eval_y(i, 0) = f(x);
    }
    return s;
}

double sine_value(double x) { return std::sin(kTwoPi * x); }

} // namespace

io::Image two_tone_image(std::size_t size, std::size_t cell)
{
    if (size < 8 || size % 2 != 0 || cell < 1)
        throw std::invalid_argument("two_tone_image: size must be even and >= 8, cell >= 1");
    const std::size_t half = size / 2;
    io::Image img(size, size, 3);
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            if (x < half) {
                const double u = static_cast<double>(x) / static_cast<double>(half - 1);
                const double v = static_cast<double>(y) / static_cast<double>(size - 1);
                img.at(x, y, 0) = 0.2 + 0.6 * u;
                img.at(x, y, 1) = 0.2 + 0.6 * v;
                img.at(x, y, 2) = 0.5;
            } else {
                const bool on = (((x - half) / cell) + (y / cell)) % 2 == 0;
                for (std::size_t c = 0; c < 3; ++c)
                    img.at(x, y, c) = on ? 0.9 : 0.1;
            }
        }
    }
    return img;
}

io::Image constant_image(std::size_t size, double r, double g, double b)
{
    io::Image img(size, size, 3);
    for (std::size_t i = 0; i < size * size; ++i) {
        img.data[3 * i] = r;
        img.data[3 * i + 1] = g;
        img.data[3 * i + 2] = b;
    }
    return img;
}

double piecewise_signal_value(double x)
{
    if (x < 0.5)
        return 0.8 * std::sin(kTwoPi * 2.0 * x);
    // instantaneous frequency rises linearly from 10 to 50 cycles per unit
    const double u = x - 0.5;
    return 0.8 * std::sin(kTwoPi * (10.0 * u + 40.0 * u * u));
}

Signal1D piecewise_signal(std::size_t train_samples, std::size_t eval_samples)
{
    return sample_signal(&piecewise_signal_value, train_samples, eval_samples);
}

Signal1D sine_signal(std::size_t train_samples, std::size_t eval_samples)
{
    return sample_signal(&sine_value, train_samples, eval_samples);
}

Matrix circle_polygon(std::size_t vertices, double radius)
{
    std::vector<std::pair<double, double>> ra;
    for (std::size_t i = 0; i < vertices; ++i)
        ra.emplace_back(radius, kTwoPi * static_cast<double>(i) / static_cast<double>(vertices));
    return polar_polygon(ra);
}

Matrix square_polygon(double half_side)
{
    const double h = half_side;
    Matrix m(4, 2);
    const double pts[4][2] = {{h, -h}, {h, h}, {-h, h}, {-h, -h}};
    for (std::size_t i = 0; i < 4; ++i) {
        m(i, 0) = pts[i][0];
        m(i, 1) = pts[i][1];
    }
    return m;
}

Matrix star_polygon(std::size_t points, double outer, double inner)
{
    std::vector<std::pair<double, double>> ra;
    const double step = std::numbers::pi / static_cast<double>(points);
    for (std::size_t i = 0; i < 2 * points; ++i)
        ra.emplace_back(i % 2 == 0 ? outer : inner, std::numbers::pi / 2.0 + step * static_cast<double>(i));
    return polar_polygon(ra);
}

Matrix gear_polygon(std::size_t teeth, double root, double tip)
{
    std::vector<std::pair<double, double>> ra;
    const double period = kTwoPi / static_cast<double>(teeth);
    for (std::size_t k = 0; k < teeth; ++k) {
        const double a = period * static_cast<double>(k);
        ra.emplace_back(root, a);
        ra.emplace_back(root, a + 0.45 * period);
        ra.emplace_back(tip, a + 0.55 * period);
        ra.emplace_back(tip, a + 0.95 * period);
    }
    return polar_polygon(ra);
}

io::Image image_fixture(const std::string& name)
{
    if (name == "two-tone")
        return two_tone_image(64, 4);
    if (name == "two-tone-32")
        return two_tone_image(32, 4);
    if (name == "constant")
        return constant_image(32, 0.25, 0.5, 0.75);
    throw std::invalid_argument("unknown image fixture: " + name);
}

Signal1D signal_fixture(const std::string& name)
{
    if (name == "piecewise")
        return piecewise_signal();
    if (name == "sine")
        return sine_signal();
    throw std::invalid_argument("unknown signal fixture: " + name);
}

Matrix polygon_fixture(const std::string& name)
{
    if (name == "circle")
        return circle_polygon(256, 1.0);
    if (name == "square")
        return square_polygon();
    if (name == "star")
        return star_polygon();
    if (name == "gear")
        return gear_polygon();
    throw std::invalid_argument("unknown polygon fixture: " + name);
}

std::unique_ptr<geom::Shape> shape_fixture(const std::string& name)
{
    if (name == "sphere")
        return std::make_unique<geom::MeshShape>(geom::icosphere(0.6, 3));
    if (name == "circle")
        return std::make_unique<geom::PolygonShape>(circle_polygon(256, 0.6));
    return std::make_unique<geom::PolygonShape>(polygon_fixture(name));
}

} // namespace sape::fixtures
