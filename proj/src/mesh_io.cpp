#include "sape/mesh_io.hpp"

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sape/blob.hpp"

namespace sape::io {

namespace {

void add_polygon(geom::TriangleMesh& mesh, const std::vector<std::size_t>& poly)
{
    for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
}

geom::TriangleMesh read_off(std::istringstream& in, const std::filesystem::path& path)
{
    std::string magic;
    in >> magic;
    std::size_t nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne))
        throw std::runtime_error("read_mesh: bad OFF header in " + path.string());
    geom::TriangleMesh mesh;
    mesh.vertices = Matrix(nv, 3);
    for (std::size_t i = 0; i < nv; ++i)
        if (!(in >> mesh.vertices(i, 0) >> mesh.vertices(i, 1) >> mesh.vertices(i, 2)))
            throw std::runtime_error("read_mesh: truncated OFF vertices in " + path.string());
    for (std::size_t f = 0; f < nf; ++f) {
        std::size_t k = 0;
        if (!(in >> k) || k < 3)
            throw std::runtime_error("read_mesh: bad OFF face in " + path.string());
        std::vector<std::size_t> poly(k);
        for (auto& v : poly)
            if (!(in >> v) || v >= nv)
                throw std::runtime_error("read_mesh: bad OFF face index in " + path.string());
        add_polygon(mesh, poly);
        std::string rest;
        std::getline(in, rest);  // optional per-face color
    }
    return mesh;
}

geom::TriangleMesh read_obj(std::istringstream& in, const std::filesystem::path& path)
{
    std::vector<double> verts;
    std::vector<std::vector<std::size_t>> polys;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw std::runtime_error("read_mesh: bad OBJ vertex in " + path.string());
            verts.insert(verts.end(), {x, y, z});
        } else if (tag == "f") {
            std::vector<std::size_t> poly;
            std::string tok;
            while (ls >> tok) {
                const long idx = std::stol(tok.substr(0, tok.find('/')));
                const long nv = static_cast<long>(verts.size() / 3);
                const long resolved = idx < 0 ? nv + idx : idx - 1;
                if (resolved < 0)
                    throw std::runtime_error("read_mesh: bad OBJ face index in " + path.string());
                poly.push_back(static_cast<std::size_t>(resolved));
            }
            if (poly.size() < 3)
                throw std::runtime_error("read_mesh: OBJ face with < 3 vertices in " + path.string());
            polys.push_back(std::move(poly));
        }
    }
    geom::TriangleMesh mesh;
    mesh.vertices = Matrix(verts.size() / 3, 3);
    mesh.vertices.data = std::move(verts);
    for (const auto& p : polys) {
        for (auto v : p)
            if (v >= mesh.vertices.rows)
                throw std::runtime_error("read_mesh: OBJ face index out of range in " + path.string());
        add_polygon(mesh, p);
    }
    return mesh;
}

} // namespace

geom::TriangleMesh read_mesh(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    if (path.extension() == ".obj")
        return read_obj(in, path);
    return read_off(in, path);
}

} // namespace sape::io
