#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "sape/encoding.hpp"
#include "support.hpp"

using namespace sape;

TEST_CASE("fourier basis layout and ordering")
{
    const auto b = enc::sample_fourier_basis(2, 256, 10.0, 1);
    CHECK(b.output_dim() == 2 + 512);
    CHECK(b.num_groups() == 256);
    CHECK(b.frequencies.rows == 256);
    CHECK(b.group_ids[0] == 0);
    CHECK(b.group_ids[1] == 0);
    CHECK(b.lipschitz_keys[0] == 0.0);
    for (std::size_t g = 1; g < b.lipschitz_keys.size(); ++g)
        CHECK(b.lipschitz_keys[g - 1] <= b.lipschitz_keys[g]);
    for (std::size_t i = 0; i < 256; ++i) {
        CHECK(b.group_ids[2 + 2 * i] == i + 1);
        CHECK(b.group_ids[3 + 2 * i] == i + 1);
        const double norm = std::hypot(b.frequencies(i, 0), b.frequencies(i, 1));
        CHECK(b.lipschitz_keys[i + 1] == doctest::Approx(norm).epsilon(1e-14));
    }
}

TEST_CASE("fourier sampling is seeded")
{
    CHECK(enc::sample_fourier_basis(2, 16, 5.0, 3) == enc::sample_fourier_basis(2, 16, 5.0, 3));
    CHECK_FALSE(enc::sample_fourier_basis(2, 16, 5.0, 3) == enc::sample_fourier_basis(2, 16, 5.0, 4));
}

TEST_CASE("fourier sampling rejects bad arguments")
{
    CHECK_THROWS_AS(enc::sample_fourier_basis(2, 8, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(enc::sample_fourier_basis(2, 8, -1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(enc::sample_fourier_basis(2, 0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("fourier components have standard deviation sigma")
{
    const auto b = enc::sample_fourier_basis(2, 10000, 10.0, 2);
    const auto& v = b.frequencies.data;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    CHECK(std::abs(sd - 10.0) < 0.2);
}

TEST_CASE("encode: identity prefix and zero frequency")
{
    const auto b = enc::fourier_basis_from(Matrix(1, 3, 0.0));
    const double p[3] = {0.1, -0.4, 0.9};
    const auto e = enc::encode(b, p);
    REQUIRE(e.size() == 5);
    CHECK(e[0] == 0.1);
    CHECK(e[1] == -0.4);
    CHECK(e[2] == 0.9);
    CHECK(e[3] == 1.0);
    CHECK(e[4] == 0.0);
}

TEST_CASE("encode: each pair lies on the unit circle")
{
    const auto b = enc::sample_fourier_basis(2, 64, 20.0, 5);
    std::mt19937_64 rng(8);
    const auto pts = testing::random_matrix(20, 2, rng);
    for (std::size_t r = 0; r < pts.rows; ++r) {
        const auto e = enc::encode(b, pts.row(r));
        for (std::size_t i = 0; i < 64; ++i) {
            const double c = e[2 + 2 * i], s = e[3 + 2 * i];
            CHECK(std::abs(c * c + s * s - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("encode: hand-evaluated quarter turn")
{
    const auto b = enc::fourier_basis_from(Matrix(1, 1, 1.0));
    const double p[1] = {0.25};
    const auto e = enc::encode(b, p);
    // 2 pi * 1 * 0.25 = pi/2
    CHECK(std::abs(e[1] - 0.0) < 1e-12);
    CHECK(std::abs(e[2] - 1.0) < 1e-12);
}

TEST_CASE("encode rejects a dimension mismatch")
{
    const auto b = enc::sample_fourier_basis(2, 4, 1.0, 0);
    const double p[3] = {0, 0, 0};
    CHECK_THROWS_AS(enc::encode(b, std::span<const double>(p, 3)), std::invalid_argument);
    CHECK_THROWS_AS(enc::encode_batch(b, Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("encode_batch agrees with encode row by row")
{
    const auto b = enc::sample_fourier_basis(2, 32, 8.0, 1);
    std::mt19937_64 rng(9);
    const auto pts = testing::random_matrix(50, 2, rng);
    const auto batch = enc::encode_batch(b, pts);
    for (std::size_t r = 0; r < pts.rows; ++r) {
        const auto e = enc::encode(b, pts.row(r));
        CHECK(std::equal(e.begin(), e.end(), batch.row(r).begin()));
    }
}

TEST_CASE("rbf: value at a center and far away")
{
    const auto b = enc::build_rbf_grid_basis(2, 5, 0.1, Domain::cube(2, -1.0, 1.0));
    CHECK(b.output_dim() == 2 + 25);
    for (std::size_t c = 0; c < b.centers.rows; ++c) {
        const auto e = enc::encode(b, b.centers.row(c));
        CHECK(e[2 + c] == 1.0);
    }
    const double far[2] = {10.0, 10.0};  // >= 10h from every center
    const auto e = enc::encode(b, far);
    for (std::size_t j = 2; j < e.size(); ++j)
        CHECK(e[j] < 1e-20);
}

TEST_CASE("rbf: hand-evaluated midpoint")
{
    const auto b = enc::build_rbf_grid_basis(1, 2, 1.0, Domain::cube(1, 0.0, 1.0));
    REQUIRE(b.centers.rows == 2);
    CHECK(b.centers(0, 0) == 0.0);
    CHECK(b.centers(1, 0) == 1.0);
    const double p[1] = {0.5};
    const auto e = enc::encode(b, p);
    // exp(-0.5^2 / 2)
    CHECK(e[1] == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
    CHECK(e[2] == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
}

TEST_CASE("rbf: single-center axis sits at the midpoint")
{
    const auto b = enc::build_rbf_grid_basis(1, 1, 0.5, Domain::cube(1, 0.0, 2.0));
    REQUIRE(b.centers.rows == 1);
    CHECK(b.centers(0, 0) == 1.0);
}

TEST_CASE("rbf tiers are groups keyed by 1/h in ascending order")
{
    const enc::RbfTier tiers[] = {{4, 0.1}, {2, 0.5}};
    const auto b = enc::build_rbf_grid_basis(1, tiers, Domain::cube(1, 0.0, 1.0));
    REQUIRE(b.num_groups() == 2);
    CHECK(b.lipschitz_keys[1] == doctest::Approx(2.0));
    CHECK(b.lipschitz_keys[2] == doctest::Approx(10.0));
    CHECK(b.output_dim() == 1 + 2 + 4);
    CHECK(b.group_ids[1] == 1);
    CHECK(b.group_ids[2] == 1);
    for (std::size_t j = 3; j < 7; ++j)
        CHECK(b.group_ids[j] == 2);
}

TEST_CASE("rbf rejects a non-positive bandwidth")
{
    CHECK_THROWS_AS(enc::build_rbf_grid_basis(1, 3, 0.0, Domain::cube(1, 0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(enc::build_rbf_grid_basis(1, 0, 1.0, Domain::cube(1, 0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("lipschitz_order sorts an explicit frequency table")
{
    Matrix f(3, 1);
    f.data = {5.0, -1.0, 2.0};
    const auto b = enc::fourier_basis_from(f);
    const auto order = enc::lipschitz_order(b);
    REQUIRE(order.size() == 4);
    CHECK(order[0] == 0);
    CHECK(order[1] == 2);
    CHECK(order[2] == 3);
    CHECK(order[3] == 1);
    const auto sorted = enc::reorder_groups(b, order);
    CHECK(sorted.frequencies(0, 0) == -1.0);
    CHECK(sorted.frequencies(1, 0) == 2.0);
    CHECK(sorted.frequencies(2, 0) == 5.0);
    CHECK(sorted.lipschitz_keys == std::vector<double>{0.0, 1.0, 2.0, 5.0});
}

TEST_CASE("identity basis has no groups beyond the coordinates")
{
    const auto b = enc::identity_basis(3);
    CHECK(b.output_dim() == 3);
    CHECK(b.num_groups() == 0);
    const double p[3] = {1, 2, 3};
    CHECK(enc::encode(b, p) == std::vector<double>{1, 2, 3});
}

TEST_CASE("basis file round-trips")
{
    const auto path = std::filesystem::temp_directory_path() / "sape_test_basis.bin";
    for (const auto& b : {enc::sample_fourier_basis(2, 8, 3.0, 4),
                          enc::build_rbf_grid_basis(2, 3, 0.2, Domain::cube(2, -1.0, 1.0)), enc::identity_basis(2)}) {
        enc::save_basis(b, path);
        CHECK(enc::load_basis(path) == b);
    }
    std::filesystem::remove(path);
}
