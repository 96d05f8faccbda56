#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "sape/domain.hpp"
#include "sape/matrix.hpp"

namespace sape::geom {

/// Boolean image; cell (x, y) is at data[y * width + x], y grows with the
/// second coordinate.
struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data;

    bool at(std::size_t x, std::size_t y) const { return data[y * width + x] != 0; }
    std::size_t count() const;
};

/// Even-odd test against the closed polygon through the rows of `vertices` (N x 2).
bool point_in_polygon(const Matrix& vertices, double x, double y);

/// Even-odd fill sampled at pixel centers over `domain` (defaults to [-1,1]^2).
/// Throws std::invalid_argument for fewer than 3 vertices.
Raster rasterize_polygon(const Matrix& vertices, std::size_t resolution, const Domain& domain = Domain::cube(2, -1.0, 1.0));

double polygon_area(const Matrix& vertices);
double polygon_perimeter(const Matrix& vertices);
/// Distance from (x, y) to the polygon boundary.
double distance_to_polygon(const Matrix& vertices, double x, double y);
/// True if two non-adjacent edges cross.
bool polygon_self_intersects(const Matrix& vertices);

/// `count` points spaced evenly by arc length along the closed polyline,
/// starting at vertex 0.
Matrix resample_closed_polyline(const Matrix& vertices, std::size_t count);

struct TriangleMesh {
    Matrix vertices;                                  // V x 3
    std::vector<std::array<std::size_t, 3>> faces;

    /// Every undirected edge shared by exactly two faces.
    bool is_watertight() const;
    double area() const;
};

TriangleMesh icosphere(double radius, int subdivisions);

/// Generalized winding number of the (closed) mesh around p.
double winding_number(const TriangleMesh& mesh, std::span<const double> p);
double distance_to_mesh(const TriangleMesh& mesh, std::span<const double> p);

/// Shape with an inside/outside oracle, used by occupancy fitting.
class Shape {
public:
    virtual ~Shape() = default;
    virtual std::size_t dim() const = 0;
    virtual bool inside(std::span<const double> p) const = 0;
    virtual double distance_to_surface(std::span<const double> p) const = 0;
    /// Uniform point on the boundary (by length / area).
    virtual std::vector<double> sample_surface(std::mt19937_64& rng) const = 0;
};

class PolygonShape final : public Shape {
public:
    /// Throws std::invalid_argument for < 3 vertices or a self-intersecting outline.
    explicit PolygonShape(Matrix vertices);
    std::size_t dim() const override { return 2; }
    bool inside(std::span<const double> p) const override;
    double distance_to_surface(std::span<const double> p) const override;
    std::vector<double> sample_surface(std::mt19937_64& rng) const override;
    const Matrix& vertices() const { return vertices_; }

private:
    Matrix vertices_;
    std::vector<double> cumulative_;  // arc length at the end of each edge
};

class MeshShape final : public Shape {
public:
    /// Throws std::invalid_argument if the mesh is not watertight.
    explicit MeshShape(TriangleMesh mesh);
    std::size_t dim() const override { return 3; }
    bool inside(std::span<const double> p) const override;
    double distance_to_surface(std::span<const double> p) const override;
    std::vector<double> sample_surface(std::mt19937_64& rng) const override;
    const TriangleMesh& mesh() const { return mesh_; }

private:
    TriangleMesh mesh_;
    std::vector<double> cumulative_;  // area at the end of each face
};

} // namespace sape::geom
