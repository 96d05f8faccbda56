#include "sape/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sape/blob.hpp"

namespace sape::io {

namespace {

std::uint8_t quantize(double v)
{
    if (!(v > 0.0))
        return 0;
    if (v >= 1.0)
        return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

Image from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t w, std::size_t h, std::size_t c, double maxval)
{
    Image img(w, h, c);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<double>(bytes[i]) / maxval;
    return img;
}

Image read_png(const std::filesystem::path& path)
{
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw std::runtime_error("read_image: " + path.string() + ": " + png.message);
    const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
    png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&png);
        throw std::runtime_error("read_image: " + path.string() + ": " + png.message);
    }
    return from_bytes(buf, png.width, png.height, gray ? 1 : 3, 255.0);
}

void write_png(const Image& img, const std::filesystem::path& path)
{
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("write_image: PNG output supports 1 or 3 channels");
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width);
    png.height = static_cast<png_uint_32>(img.height);
    png.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(img.data.size());
    std::transform(img.data.begin(), img.data.end(), buf.begin(), quantize);
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(png, size, 0, buf.data(), 0, nullptr))
        throw std::runtime_error("write_image: PNG encoding failed: " + std::string(png.message));
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, buf.data(), 0, nullptr))
        throw std::runtime_error("write_image: PNG encoding failed: " + std::string(png.message));
    out.resize(size);
    write_file_atomic(path, out);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string netpbm_token(const std::string& s, std::size_t& pos)
{
    for (;;) {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos < s.size() && s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n')
                ++pos;
            continue;
        }
        break;
    }
    const std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    if (start == pos)
        throw std::runtime_error("read_image: truncated PNM header");
    return s.substr(start, pos - start);
}

Image read_pnm(const std::string& bytes, const std::filesystem::path& path)
{
    std::size_t pos = 0;
    const std::string magic = netpbm_token(bytes, pos);
    const bool binary = magic == "P5" || magic == "P6";
    const bool ascii = magic == "P2" || magic == "P3";
    if (!binary && !ascii)
        throw std::runtime_error("read_image: unsupported format in " + path.string());
    const std::size_t channels = (magic == "P6" || magic == "P3") ? 3 : 1;
    const auto w = std::stoul(netpbm_token(bytes, pos));
    const auto h = std::stoul(netpbm_token(bytes, pos));
    const auto maxval = std::stoul(netpbm_token(bytes, pos));
    if (maxval == 0 || maxval > 65535)
        throw std::runtime_error("read_image: bad maxval in " + path.string());
    const std::size_t n = w * h * channels;
    Image img(w, h, channels);
    if (binary) {
        ++pos;  // single whitespace before raster
        const std::size_t bps = maxval < 256 ? 1 : 2;
        if (bytes.size() < pos + n * bps)
            throw std::runtime_error("read_image: truncated raster in " + path.string());
        for (std::size_t i = 0; i < n; ++i) {
            unsigned v = static_cast<unsigned char>(bytes[pos + i * bps]);
            if (bps == 2)
                v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * 2 + 1]);
            img.data[i] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = static_cast<double>(std::stoul(netpbm_token(bytes, pos))) / static_cast<double>(maxval);
    }
    return img;
}

void write_pnm(const Image& img, const std::filesystem::path& path, std::size_t channels)
{
    if (img.channels != channels)
        throw std::invalid_argument("write_image: " + path.extension().string() + " needs " + std::to_string(channels) +
                                    " channel(s), image has " + std::to_string(img.channels));
    std::string out = (channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out[header + i] = static_cast<char>(quantize(img.data[i]));
    write_file_atomic(path, out);
}

} // namespace

Image read_image(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0)
        return read_png(path);
    return read_pnm(bytes, path);
}

void write_image(const Image& image, const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".png")
        write_png(image, path);
    else if (ext == ".pgm")
        write_pnm(image, path, 1);
    else if (ext == ".ppm")
        write_pnm(image, path, 3);
    else
        throw std::invalid_argument("write_image: unsupported extension '" + ext + "'");
}

Image scalar_field_image(std::span<const double> values, std::size_t width, std::size_t height, double lo, double hi)
{
    if (values.size() != width * height)
        throw std::invalid_argument("scalar_field_image: size mismatch");
    Image img(width, height, 1);
    const double range = hi > lo ? hi - lo : 1.0;
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            img.at(x, height - 1 - y, 0) = std::clamp((values[y * width + x] - lo) / range, 0.0, 1.0);
    return img;
}

Matrix read_points(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<double> flat;
    std::size_t cols = 0, rows = 0;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v)
            row.push_back(v);
        if (!ls.eof())
            throw std::runtime_error("read_points: non-numeric token in " + path.string());
        if (row.empty())
            continue;
        if (cols == 0)
            cols = row.size();
        else if (row.size() != cols)
            throw std::runtime_error("read_points: inconsistent column count in " + path.string());
        flat.insert(flat.end(), row.begin(), row.end());
        ++rows;
    }
    Matrix m(rows, cols);
    m.data = std::move(flat);
    return m;
}

void write_points(const Matrix& points, const std::filesystem::path& path)
{
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < points.rows; ++i) {
        for (std::size_t c = 0; c < points.cols; ++c)
            out << (c ? " " : "") << points(i, c);
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

} // namespace sape::io
