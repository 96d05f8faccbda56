#include "sape/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sape/kernels.hpp"

namespace sape::metrics {

double mse(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("mse: inputs must be non-empty and of equal size");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

double psnr(std::span<const double> predicted, std::span<const double> reference)
{
    if (predicted.size() != reference.size())
        throw std::invalid_argument("psnr: image sizes differ");
    const double e = mse(predicted, reference);
    if (e <= 0.0)
        return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / e));
}

double iou(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> reference)
{
    if (predicted.size() != reference.size())
        throw std::invalid_argument("iou: masks have different support");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool a = predicted[i] != 0, b = reference[i] != 0;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double chamfer_symmetric(const Matrix& a, const Matrix& b)
{
    if (a.rows == 0 || b.rows == 0)
        throw std::invalid_argument("chamfer_symmetric: point sets must be non-empty");
    if (a.cols != b.cols)
        throw std::invalid_argument("chamfer_symmetric: point dimensions differ");
    const auto ab = kernels::nearest_neighbors(a, b);
    const auto ba = kernels::nearest_neighbors(b, a);
    return mean(ab.sq_distance) + mean(ba.sq_distance);
}

} // namespace sape::metrics
