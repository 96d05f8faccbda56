#include "sape/kernels.hpp"

#include <limits>
#include <stdexcept>

namespace sape::kernels::reference {

void gemm(std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c)
{
    if (a.size() < m * k || b.size() < k * n || c.size() < m * n)
        throw std::invalid_argument("gemm: buffer smaller than the stated shape");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p)
                s += a[i * k + p] * b[p * n + j];
            c[i * n + j] = s;
        }
}

Nearest nearest_neighbors(const Matrix& queries, const Matrix& targets)
{
    if (queries.cols != targets.cols)
        throw std::invalid_argument("nearest_neighbors: dimension mismatch");
    if (targets.rows == 0)
        throw std::invalid_argument("nearest_neighbors: empty target set");

    Nearest out;
    for (std::size_t i = 0; i < queries.rows; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < targets.rows; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < queries.cols; ++c) {
                const double diff = queries(i, c) - targets(j, c);
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                best_j = j;
            }
        }
        out.index.push_back(best_j);
        out.sq_distance.push_back(best);
    }
    return out;
}

} // namespace sape::kernels::reference
