#pragma once

#include <filesystem>

#include "sape/geometry.hpp"

namespace sape::io {

/// ASCII OFF or OBJ (vertices and faces only; polygons are fan-triangulated).
geom::TriangleMesh read_mesh(const std::filesystem::path& path);

} // namespace sape::io
