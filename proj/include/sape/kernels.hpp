#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sape/matrix.hpp"

// Data-parallel inner loops of the library.
//
// Every kernel here splits work over independent outputs only; reductions
// run in a fixed index order inside one output, so the result does not
// depend on the number of OpenMP threads. The serial versions in
// `reference` are the straight-line definitions the parallel kernels are
// tested and benchmarked against.
namespace sape::kernels {

/// c[m x n] = a[m x k] * b[k x n], all row-major. `c` is overwritten.
void gemm(std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c);

/// Matrix wrapper: returns a * b.
Matrix matmul(const Matrix& a, const Matrix& b);

/// out[j] = sum_i m(i, j), summed in increasing i.
std::vector<double> column_sums(const Matrix& m);

struct Nearest {
    std::vector<std::size_t> index;   // per query: index of the closest target
    std::vector<double> sq_distance;  // per query: squared Euclidean distance to it
};

/// Brute-force nearest target for every query row. Ties go to the lowest index.
Nearest nearest_neighbors(const Matrix& queries, const Matrix& targets);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

namespace reference {

void gemm(std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c);

Nearest nearest_neighbors(const Matrix& queries, const Matrix& targets);

} // namespace reference

} // namespace sape::kernels
