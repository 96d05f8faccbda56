#include "sape/blob.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sape::io {

namespace {

static_assert(sizeof(double) == 8);

template <typename T>
void append_le(std::string& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(const char* p)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

} // namespace

void write_blob(const std::filesystem::path& path, const nlohmann::json& header, std::span<const double> payload)
{
    const std::string h = header.dump();
    std::string out;
    out.reserve(8 + h.size() + payload.size() * 8);
    append_le<std::uint64_t>(out, h.size());
    out += h;
    for (double v : payload)
        append_le<double>(out, v);
    write_file_atomic(path, out);
}

Blob read_blob(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    if (bytes.size() < 8)
        throw std::runtime_error("read_blob: file too short: " + path.string());
    const auto hlen = read_le<std::uint64_t>(bytes.data());
    if (hlen > bytes.size() - 8 || (bytes.size() - 8 - hlen) % 8 != 0)
        throw std::runtime_error("read_blob: corrupt header length in " + path.string());
    Blob b;
    b.header = nlohmann::json::parse(bytes.substr(8, hlen));
    const char* p = bytes.data() + 8 + hlen;
    const std::size_t n = (bytes.size() - 8 - hlen) / 8;
    b.payload.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        b.payload[i] = read_le<double>(p + 8 * i);
    return b;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace sape::io
