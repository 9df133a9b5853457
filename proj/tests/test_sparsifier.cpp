#include <doctest.h>

#include <numeric>

#include "srnsz/sparsifier.hpp"

using namespace srnsz;

namespace {

DataGrid iota(const Shape& shape) {
    std::vector<double> v(shape.count());
    std::iota(v.begin(), v.end(), 0.0);
    return DataGrid(shape, v);
}

}  // namespace

TEST_CASE("anchor counts") {
    auto a = sparsify(iota(Shape{65}), 32);
    REQUIRE(a.values.size() == 3);
    CHECK(a.values == std::vector<double>{0, 32, 64});
    a = sparsify(iota(Shape{64}), 32);
    CHECK(a.values == std::vector<double>{0, 32});
    a = sparsify(iota(Shape{129, 65}), 32);
    CHECK(a.anchor_shape == Shape{5, 3});
    CHECK(a.values.size() == 15);
    CHECK(a.values[4] == 1 * 32 * 65 + 32);
    CHECK(a.values[14] == 4 * 32 * 65 + 64);
}

TEST_CASE("stride validation") {
    for (std::size_t s : {0u, 1u, 3u, 12u, 33u}) CHECK_THROWS_AS(sparsify(iota(Shape{9}), s), ConfigError);
    for (std::size_t s : {2u, 4u, 64u}) CHECK_NOTHROW(sparsify(iota(Shape{9}), s));
}

TEST_CASE("anchor shape rule across sizes") {
    for (std::size_t n = 1; n < 200; ++n) {
        for (std::size_t s : {2u, 8u, 32u}) CHECK(anchor_extent(n, s) == (n - 1) / s + 1);
    }
}

TEST_CASE("embed anchors") {
    const auto grid = iota(Shape{33, 70});
    const auto anchors = sparsify(grid, 32);
    const auto zero = DataGrid::constant(grid.shape(), 0.0);
    const auto once = embed_anchors(zero, anchors);
    CHECK(once[32] == 32.0);
    CHECK(once[32 * 70 + 64] == grid[32 * 70 + 64]);
    CHECK(once[1] == 0.0);
    const auto twice = embed_anchors(once, anchors);
    CHECK((twice.values() == once.values()).all());
    CHECK_THROWS_AS(embed_anchors(DataGrid::constant(Shape{33, 97}, 0.0), anchors), DomainError);
}
