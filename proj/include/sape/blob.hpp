#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sape::io {

// Binary container used by every checkpoint file:
//
//   uint64 (little-endian)  header length in bytes
//   header                  UTF-8 JSON object
//   payload                 float64 values, little-endian, to end of file
//
// The header says how to slice the payload.
struct Blob {
    nlohmann::json header;
    std::vector<double> payload;
};

void write_blob(const std::filesystem::path& path, const nlohmann::json& header, std::span<const double> payload);
Blob read_blob(const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace sape::io
