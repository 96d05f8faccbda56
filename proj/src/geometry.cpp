#include "sape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace sape::geom {

std::size_t Raster::count() const
{
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

bool point_in_polygon(const Matrix& v, double x, double y)
{
    bool inside = false;
    const std::size_t n = v.rows;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = v(i, 0), yi = v(i, 1);
        const double xj = v(j, 0), yj = v(j, 1);
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi)
            inside = !inside;
    }
    return inside;
}

Raster rasterize_polygon(const Matrix& vertices, std::size_t resolution, const Domain& domain)
{
    if (vertices.rows < 3 || vertices.cols != 2)
        throw std::invalid_argument("rasterize_polygon: need at least 3 two-dimensional vertices");
    if (resolution == 0 || domain.dim() != 2)
        throw std::invalid_argument("rasterize_polygon: bad resolution or domain");

    Raster r{resolution, resolution, std::vector<std::uint8_t>(resolution * resolution, 0)};
    const double sx = (domain.hi[0] - domain.lo[0]) / static_cast<double>(resolution);
    const double sy = (domain.hi[1] - domain.lo[1]) / static_cast<double>(resolution);
    const auto rows = static_cast<std::ptrdiff_t>(resolution);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t yi = 0; yi < rows; ++yi) {
        const double y = domain.lo[1] + (static_cast<double>(yi) + 0.5) * sy;
        for (std::size_t xi = 0; xi < resolution; ++xi) {
            const double x = domain.lo[0] + (static_cast<double>(xi) + 0.5) * sx;
            r.data[static_cast<std::size_t>(yi) * resolution + xi] = point_in_polygon(vertices, x, y) ? 1 : 0;
        }
    }
    return r;
}

double polygon_area(const Matrix& v)
{
    double s = 0.0;
    for (std::size_t i = 0, j = v.rows - 1; i < v.rows; j = i++)
        s += v(j, 0) * v(i, 1) - v(i, 0) * v(j, 1);
    return 0.5 * std::abs(s);
}

double polygon_perimeter(const Matrix& v)
{
    double s = 0.0;
    for (std::size_t i = 0, j = v.rows - 1; i < v.rows; j = i++)
        s += std::hypot(v(i, 0) - v(j, 0), v(i, 1) - v(j, 1));
    return s;
}

namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by)
{
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool segments_cross(const double* a, const double* b, const double* c, const double* d)
{
    const double d1 = cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
    const double d2 = cross(b[0] - a[0], b[1] - a[1], d[0] - a[0], d[1] - a[1]);
    const double d3 = cross(d[0] - c[0], d[1] - c[1], a[0] - c[0], a[1] - c[1]);
    const double d4 = cross(d[0] - c[0], d[1] - c[1], b[0] - c[0], b[1] - c[1]);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

} // namespace

double distance_to_polygon(const Matrix& v, double x, double y)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.rows - 1; i < v.rows; j = i++)
        best = std::min(best, segment_distance(x, y, v(j, 0), v(j, 1), v(i, 0), v(i, 1)));
    return best;
}

bool polygon_self_intersects(const Matrix& v)
{
    const std::size_t n = v.rows;
    if (n < 4)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = v.data.data() + i * 2;
        const double* b = v.data.data() + ((i + 1) % n) * 2;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;  // adjacent through the closing edge
            const double* c = v.data.data() + j * 2;
            const double* d = v.data.data() + ((j + 1) % n) * 2;
            if (segments_cross(a, b, c, d))
                return true;
        }
    }
    return false;
}

Matrix resample_closed_polyline(const Matrix& v, std::size_t count)
{
    if (v.rows < 2 || v.cols != 2)
        throw std::invalid_argument("resample_closed_polyline: need at least 2 two-dimensional vertices");
    const double total = polygon_perimeter(v);
    Matrix out(count, 2);
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(count);
        for (;;) {
            const std::size_t a = edge % v.rows, b = (edge + 1) % v.rows;
            const double len = std::hypot(v(b, 0) - v(a, 0), v(b, 1) - v(a, 1));
            if (s <= edge_start + len || edge + 1 >= v.rows) {
                const double t = len > 0.0 ? std::clamp((s - edge_start) / len, 0.0, 1.0) : 0.0;
                out(k, 0) = v(a, 0) + t * (v(b, 0) - v(a, 0));
                out(k, 1) = v(a, 1) + t * (v(b, 1) - v(a, 1));
                break;
            }
            edge_start += len;
            ++edge;
        }
    }
    return out;
}

bool TriangleMesh::is_watertight() const
{
    if (faces.empty())
        return false;
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& f : faces) {
        for (int k = 0; k < 3; ++k) {
            std::size_t a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
            if (a >= vertices.rows || b >= vertices.rows)
                return false;
            if (a > b)
                std::swap(a, b);
            ++edges[{a, b}];
        }
    }
    return std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 vertex(const TriangleMesh& m, std::size_t i) { return {m.vertices(i, 0), m.vertices(i, 1), m.vertices(i, 2)}; }

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c)
{
    const Vec3 ab = sub(b, a), ac = sub(c, a), ap = sub(p, a);
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0)
        return a;
    const Vec3 bp = sub(p, b);
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3)
        return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0)
        return add(a, scale(ab, d1 / (d1 - d3)));
    const Vec3 cp = sub(p, c);
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6)
        return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0)
        return add(a, scale(ac, d2 / (d2 - d6)));
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return add(b, scale(sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6))));
    const double denom = 1.0 / (va + vb + vc);
    return add(a, add(scale(ab, vb * denom), scale(ac, vc * denom)));
}

} // namespace

double TriangleMesh::area() const
{
    double s = 0.0;
    for (const auto& f : faces) {
        const Vec3 a = vertex(*this, f[0]), b = vertex(*this, f[1]), c = vertex(*this, f[2]);
        s += 0.5 * norm(cross3(sub(b, a), sub(c, a)));
    }
    return s;
}

TriangleMesh icosphere(double radius, int subdivisions)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                               {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<std::size_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& v : verts)
        v = scale(v, 1.0 / norm(v));

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints;
        auto midpoint = [&](std::size_t a, std::size_t b) {
            const auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end())
                return it->second;
            Vec3 m = scale(add(verts[a], verts[b]), 0.5);
            verts.push_back(scale(m, 1.0 / norm(m)));
            midpoints[key] = verts.size() - 1;
            return verts.size() - 1;
        };
        std::vector<std::array<std::size_t, 3>> next;
        for (const auto& f : faces) {
            const std::size_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh mesh;
    mesh.vertices = Matrix(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k)
            mesh.vertices(i, k) = verts[i][k] * radius;
    mesh.faces = std::move(faces);
    return mesh;
}

double winding_number(const TriangleMesh& mesh, std::span<const double> p)
{
    const Vec3 q{p[0], p[1], p[2]};
    double total = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3 a = sub(vertex(mesh, f[0]), q), b = sub(vertex(mesh, f[1]), q), c = sub(vertex(mesh, f[2]), q);
        const double la = norm(a), lb = norm(b), lc = norm(c);
        const double num = dot(a, cross3(b, c));
        const double den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
        total += 2.0 * std::atan2(num, den);
    }
    return total / (4.0 * std::numbers::pi);
}

double distance_to_mesh(const TriangleMesh& mesh, std::span<const double> p)
{
    const Vec3 q{p[0], p[1], p[2]};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : mesh.faces) {
        const Vec3 c = closest_on_triangle(q, vertex(mesh, f[0]), vertex(mesh, f[1]), vertex(mesh, f[2]));
        best = std::min(best, norm(sub(q, c)));
    }
    return best;
}

PolygonShape::PolygonShape(Matrix vertices) : vertices_(std::move(vertices))
{
    if (vertices_.rows < 3 || vertices_.cols != 2)
        throw std::invalid_argument("PolygonShape: need at least 3 two-dimensional vertices");
    if (polygon_self_intersects(vertices_))
        throw std::invalid_argument("PolygonShape: outline self-intersects, inside/outside is ill-defined");
    double acc = 0.0;
    for (std::size_t i = 0; i < vertices_.rows; ++i) {
        const std::size_t j = (i + 1) % vertices_.rows;
        acc += std::hypot(vertices_(j, 0) - vertices_(i, 0), vertices_(j, 1) - vertices_(i, 1));
        cumulative_.push_back(acc);
    }
}

bool PolygonShape::inside(std::span<const double> p) const { return point_in_polygon(vertices_, p[0], p[1]); }

double PolygonShape::distance_to_surface(std::span<const double> p) const
{
    return distance_to_polygon(vertices_, p[0], p[1]);
}

std::vector<double> PolygonShape::sample_surface(std::mt19937_64& rng) const
{
    std::uniform_real_distribution<double> u(0.0, cumulative_.back());
    const double s = u(rng);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    const std::size_t j = (i + 1) % vertices_.rows;
    const double start = i == 0 ? 0.0 : cumulative_[i - 1];
    const double len = cumulative_[i] - start;
    const double t = len > 0.0 ? (s - start) / len : 0.0;
    return {vertices_(i, 0) + t * (vertices_(j, 0) - vertices_(i, 0)), vertices_(i, 1) + t * (vertices_(j, 1) - vertices_(i, 1))};
}

MeshShape::MeshShape(TriangleMesh mesh) : mesh_(std::move(mesh))
{
    if (mesh_.vertices.cols != 3)
        throw std::invalid_argument("MeshShape: vertices must be 3D");
    if (!mesh_.is_watertight())
        throw std::invalid_argument("MeshShape: mesh is not watertight, inside/outside is ill-defined");
    double acc = 0.0;
    for (const auto& f : mesh_.faces) {
        const Vec3 a = vertex(mesh_, f[0]), b = vertex(mesh_, f[1]), c = vertex(mesh_, f[2]);
        acc += 0.5 * norm(cross3(sub(b, a), sub(c, a)));
        cumulative_.push_back(acc);
    }
}

bool MeshShape::inside(std::span<const double> p) const { return std::abs(winding_number(mesh_, p)) > 0.5; }

double MeshShape::distance_to_surface(std::span<const double> p) const { return distance_to_mesh(mesh_, p); }

std::vector<double> MeshShape::sample_surface(std::mt19937_64& rng) const
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = u(rng) * cumulative_.back();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t fi = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    const auto& f = mesh_.faces[fi];
    double r1 = u(rng), r2 = u(rng);
    if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    const Vec3 a = vertex(mesh_, f[0]), b = vertex(mesh_, f[1]), c = vertex(mesh_, f[2]);
    const Vec3 q = add(a, add(scale(sub(b, a), r1), scale(sub(c, a), r2)));
    return {q[0], q[1], q[2]};
}

} // namespace sape::geom
