#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "srnsz/grid.hpp"
#include "srnsz/grid_io.hpp"

using namespace srnsz;

namespace {

DataGrid line(std::vector<double> v, Precision p = Precision::f64) {
    const std::size_t n = v.size();
    return DataGrid(Shape{n}, v, p);
}

}  // namespace

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(Shape(std::vector<std::size_t>{}), DomainError);
    CHECK_THROWS_AS(Shape({2, 2, 2, 2}), DomainError);
    CHECK_THROWS_AS(Shape({4, 0}), DomainError);
    const Shape s{3, 4, 5};
    CHECK(s.count() == 60);
    CHECK(s.padded3() == std::array<std::size_t, 3>{3, 4, 5});
    CHECK(Shape{7}.padded3() == std::array<std::size_t, 3>{1, 1, 7});
    CHECK(Shape{6, 7}.padded3() == std::array<std::size_t, 3>{1, 6, 7});
    CHECK(to_string(Shape{129, 65}) == "129x65");
}

TEST_CASE("grid rejects bad values and sizes") {
    CHECK_THROWS_AS(line({0.0, std::nan("")}), IngestionError);
    CHECK_THROWS_AS(line({1.0, std::numeric_limits<double>::infinity()}), IngestionError);
    CHECK_THROWS_AS(DataGrid(Shape{3}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("vrange") {
    CHECK(vrange(line({0.0, 1.0})) == 1.0);
    CHECK(vrange(line({5, 5, 5})) == 0.0);
    CHECK(vrange(line({-2.5, 0.0, 1.5})) == 4.0);
    CHECK_THROWS_AS(vrange(DataGrid{}), DomainError);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    std::vector<double> v(100);
    for (auto& x : v) x = std::ldexp(std::round(std::ldexp(u(rng), 20)), -20);
    const double base = vrange(line(v));
    for (double c : {0.5, -3.0, 1024.0}) {
        auto shifted = v;
        for (auto& x : shifted) x += c;
        CHECK(vrange(line(shifted)) == base);
    }
}

TEST_CASE("normalize and denormalize examples") {
    {
        auto [g, p] = normalize(line({2, 4}));
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 1.0);
        CHECK(p.minimum == 2.0);
        CHECK(p.range == 2.0);
        const auto back = denormalize(g, p);
        CHECK(back[0] == 2.0);
        CHECK(back[1] == 4.0);
    }
    {
        auto [g, p] = normalize(line({7, 7}));
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 0.0);
        CHECK(p.minimum == 7.0);
        CHECK(p.range == 0.0);
        const auto back = denormalize(g, p);
        CHECK(back[0] == 7.0);
        CHECK(back[1] == 7.0);
    }
    {
        auto [g, p] = normalize(line({1, 2, 3}));
        CHECK(g[1] == 0.5);
        CHECK(p.minimum == 1.0);
        CHECK(p.range == 2.0);
        const auto back = denormalize(g, p);
        CHECK(back[0] == 1.0);
        CHECK(back[1] == 2.0);
        CHECK(back[2] == 3.0);
    }
}

TEST_CASE("normalize round trip on random grids") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::size_t exact = 0, total = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(1000);
        for (auto& x : v) x = u(rng);
        const auto grid = line(v);
        auto [g, p] = normalize(grid);
        CHECK(g.values().minCoeff() >= 0.0);
        CHECK(g.values().maxCoeff() <= 1.0);
        const auto back = denormalize(g, p);
        for (std::size_t i = 0; i < v.size(); ++i) {
            // Two roundings (divide, multiply-add) bound the drift by a few ulps of the range.
            CHECK(std::abs(back[i] - v[i]) <= 4 * std::numeric_limits<double>::epsilon() * p.range);
            exact += back[i] == v[i];
            ++total;
        }
    }
    MESSAGE("bit-exact round trips: " << exact << " of " << total);
}

TEST_CASE("error bound resolution") {
    const auto grid = line({-1.0, 3.0});
    const auto rel = ErrorBoundSpec::resolve(ErrorBoundMode::value_range_relative, 1e-3, grid);
    CHECK(rel.resolved_e == 1e-3 * 4.0);
    CHECK(rel.relative_epsilon(4.0) == 1e-3);
    const auto abs = ErrorBoundSpec::resolve(ErrorBoundMode::absolute, 0.25, grid);
    CHECK(abs.resolved_e == 0.25);
    CHECK(abs.relative_epsilon(4.0) == 0.0625);
    CHECK_THROWS_AS(ErrorBoundSpec::resolve(ErrorBoundMode::absolute, -1.0, grid), ConfigError);
    CHECK_THROWS_AS(ErrorBoundSpec::resolve(ErrorBoundMode::absolute, std::nan(""), grid), ConfigError);
    CHECK(to_string(ErrorBoundMode::absolute) == "abs");
    CHECK(error_bound_mode_from_string("rel") == ErrorBoundMode::value_range_relative);
}

TEST_CASE("raw file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "srnsz_grid_io";
    std::filesystem::create_directories(dir);
    for (auto p : {Precision::f32, Precision::f64}) {
        std::vector<double> v;
        for (int i = 0; i < 24; ++i) v.push_back(round_to_precision(0.1 * i - 1.0, p));
        const DataGrid grid(Shape{2, 3, 4}, v, p);
        const auto path = dir / ("g." + to_string(p));
        write_raw(path, grid);
        CHECK(std::filesystem::file_size(path) == 24 * element_bytes(p));
        const auto back = read_raw(path, p, Shape{2, 3, 4});
        CHECK(back.source_precision() == p);
        for (int i = 0; i < 24; ++i) CHECK(back[i] == v[i]);
    }
    try {
        read_raw(dir / "g.f32", Precision::f32, Shape{5, 5});
        FAIL("expected a size mismatch");
    } catch (const IngestionError& e) {
        CHECK(std::string(e.what()).find("size mismatch") != std::string::npos);
    }
    CHECK_THROWS_AS(read_raw(dir / "missing.f32", Precision::f32, Shape{1}), IngestionError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("raw decode rejects non-finite samples") {
    std::vector<std::uint8_t> bytes(8);
    const float vals[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
    std::memcpy(bytes.data(), vals, 8);
    CHECK_THROWS_AS(decode_raw(bytes, Precision::f32, Shape{2}), IngestionError);
}
