#include "sape/kernels.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sape::kernels {

namespace {

constexpr std::size_t kTileRows = 8;
constexpr std::size_t kTileCols = 16;
constexpr std::size_t kDepthBlock = 256;  // rows of b packed per panel

// One MR x kTileCols block of c against a packed strip of b (kc x kTileCols,
// contiguous). Only the first `nr` columns are read from / written to c.
// With `resume`, accumulation continues from the values already in c, which
// keeps the per-element summation order identical to an unblocked k loop.
template <std::size_t MR>
inline void tile(std::size_t kc, const double* a, std::size_t lda, const double* strip, double* c, std::size_t ldc,
                 std::size_t nr, bool resume)
{
    double acc[MR][kTileCols] = {};
    if (resume)
        for (std::size_t r = 0; r < MR; ++r)
            for (std::size_t j = 0; j < nr; ++j)
                acc[r][j] = c[r * ldc + j];
    for (std::size_t p = 0; p < kc; ++p) {
        const double* bp = strip + p * kTileCols;
        for (std::size_t r = 0; r < MR; ++r) {
            const double ar = a[r * lda + p];
#pragma omp simd
            for (std::size_t j = 0; j < kTileCols; ++j)
                acc[r][j] += ar * bp[j];
        }
    }
    for (std::size_t r = 0; r < MR; ++r)
        for (std::size_t j = 0; j < nr; ++j)
            c[r * ldc + j] = acc[r][j];
}

// MR rows of c against every packed strip of the current panel.
template <std::size_t MR>
inline void row_block(std::size_t n, std::size_t kc, std::size_t lda, const double* a, const double* packed, double* c,
                      bool resume)
{
    for (std::size_t j = 0, s = 0; j < n; j += kTileCols, ++s)
        tile<MR>(kc, a, lda, packed + s * kc * kTileCols, c + j, n, std::min(kTileCols, n - j), resume);
}

// Rows [p0, p0 + kc) of b as column strips of width kTileCols, zero-padded.
void pack_panel(std::size_t n, std::size_t kc, const double* b, std::vector<double>& packed)
{
    const std::size_t strips = (n + kTileCols - 1) / kTileCols;
    packed.assign(strips * kc * kTileCols, 0.0);
    for (std::size_t s = 0; s < strips; ++s) {
        const std::size_t j0 = s * kTileCols, w = std::min(kTileCols, n - j0);
        double* dst = packed.data() + s * kc * kTileCols;
        for (std::size_t p = 0; p < kc; ++p)
            std::copy_n(b + p * n + j0, w, dst + p * kTileCols);
    }
}

void check_sizes(std::size_t m, std::size_t n, std::size_t k, std::size_t a, std::size_t b, std::size_t c)
{
    if (a < m * k || b < k * n || c < m * n)
        throw std::invalid_argument("gemm: buffer smaller than the stated shape");
}

} // namespace

void gemm(std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c)
{
    check_sizes(m, n, k, a.size(), b.size(), c.size());
    if (k == 0) {
        std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m * n), 0.0);
        return;
    }
    const std::size_t full_blocks = m / kTileRows;
    const auto blocks = static_cast<std::ptrdiff_t>(full_blocks);
    std::vector<double> packed;

    for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
        const std::size_t kc = std::min(kDepthBlock, k - p0);
        const bool resume = p0 > 0;
        pack_panel(n, kc, b.data() + p0 * n, packed);
        const double* bp = packed.data();

#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
            const std::size_t i = static_cast<std::size_t>(blk) * kTileRows;
            row_block<kTileRows>(n, kc, k, a.data() + i * k + p0, bp, c.data() + i * n, resume);
        }

        const std::size_t i = full_blocks * kTileRows;
        const double* ai = a.data() + i * k + p0;
        double* ci = c.data() + i * n;
        switch (m - i) {
        case 7: row_block<7>(n, kc, k, ai, bp, ci, resume); break;
        case 6: row_block<6>(n, kc, k, ai, bp, ci, resume); break;
        case 5: row_block<5>(n, kc, k, ai, bp, ci, resume); break;
        case 4: row_block<4>(n, kc, k, ai, bp, ci, resume); break;
        case 3: row_block<3>(n, kc, k, ai, bp, ci, resume); break;
        case 2: row_block<2>(n, kc, k, ai, bp, ci, resume); break;
        case 1: row_block<1>(n, kc, k, ai, bp, ci, resume); break;
        default: break;
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    gemm(a.rows, b.cols, a.cols, a.data, b.data, c.data);
    return c;
}

std::vector<double> column_sums(const Matrix& m)
{
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j)
            out[j] += r[j];
    }
    return out;
}

Nearest nearest_neighbors(const Matrix& queries, const Matrix& targets)
{
    if (queries.cols != targets.cols)
        throw std::invalid_argument("nearest_neighbors: dimension mismatch");
    if (targets.rows == 0)
        throw std::invalid_argument("nearest_neighbors: empty target set");

    const std::size_t dim = queries.cols;
    Nearest out;
    out.index.assign(queries.rows, 0);
    out.sq_distance.assign(queries.rows, 0.0);
    const auto nq = static_cast<std::ptrdiff_t>(queries.rows);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t qi = 0; qi < nq; ++qi) {
        const double* q = queries.data.data() + static_cast<std::size_t>(qi) * dim;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < targets.rows; ++j) {
            const double* t = targets.data.data() + j * dim;
            double d2 = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = q[c] - t[c];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                best_j = j;
            }
        }
        out.index[static_cast<std::size_t>(qi)] = best_j;
        out.sq_distance[static_cast<std::size_t>(qi)] = best;
    }
    return out;
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace sape::kernels
