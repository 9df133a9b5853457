#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "srnsz/quantizer.hpp"

using namespace srnsz;
using srnsz::testing::quantize_oracle;

namespace {

constexpr std::uint32_t R = kDefaultQuantRadius;

}  // namespace

TEST_CASE("quantize examples") {
    auto q = quantize(1.0, 1.0, 0.3, R);
    CHECK(q.symbol == R);
    CHECK(q.reconstructed == 1.0);

    q = quantize(1.0, 1.25, 0.1, R);
    CHECK(q.symbol == R + 1);
    CHECK(q.reconstructed == doctest::Approx(1.2));
    CHECK(std::abs(1.25 - q.reconstructed) <= 0.1);

    q = quantize(0.0, 1000.0, 1e-6, R);
    CHECK(q.is_outlier());
    CHECK(q.reconstructed == 1000.0);

    CHECK_THROWS_AS(quantize(0, 1, 0.0, R), ConfigError);
    CHECK_THROWS_AS(quantize(0, 1, -1.0, R), ConfigError);
}

TEST_CASE("dequantize examples and errors") {
    CHECK(dequantize(1.0, R, std::nullopt, 0.1, R) == 1.0);
    CHECK(dequantize(1.0, R + 1, std::nullopt, 0.1, R) == doctest::Approx(1.2));
    CHECK(dequantize(1.0, R + 1, std::nullopt, 0.1, R) == quantize(1.0, 1.25, 0.1, R).reconstructed);
    CHECK(dequantize(0.0, 0, 1000.0, 1e-6, R) == 1000.0);
    CHECK_THROWS_AS(dequantize(0.0, 2 * R, std::nullopt, 0.1, R), CorruptStreamError);
    CHECK_THROWS_AS(dequantize(0.0, 0, std::nullopt, 0.1, R), CorruptStreamError);
}

TEST_CASE("ties round away from zero") {
    // Residual of exactly +-3e sits on a bin boundary: k = +-2.
    auto q = quantize(0.0, 1.5, 0.5, R);
    CHECK(q.symbol == R + 2);
    CHECK(q.reconstructed == 2.0);
    q = quantize(0.0, -1.5, 0.5, R);
    CHECK(q.symbol == R - 2);
    CHECK(q.reconstructed == -2.0);
    q = quantize(4.0, 4.5, 0.25, R);
    CHECK(q.symbol == R + 1);
}

TEST_CASE("direct arithmetic oracle on a million triples") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> expo(-40, 40);
    std::size_t mismatches = 0, violations = 0, outliers = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        const double scale = std::ldexp(1.0, expo(rng));
        const double pred = u(rng) * scale;
        const double actual = pred + u(rng) * scale * std::ldexp(1.0, expo(rng) / 4);
        const double e = std::abs(u(rng)) * scale * 1e-3 + std::numeric_limits<double>::denorm_min();
        const auto q = quantize(pred, actual, e, R);
        const auto o = quantize_oracle(pred, actual, e, R);
        if (q.is_outlier() != o.outlier || q.symbol != o.symbol || q.reconstructed != o.recon) ++mismatches;
        if (!(std::abs(actual - q.reconstructed) <= e)) ++violations;
        outliers += q.is_outlier();
        const std::optional<double> stored = q.is_outlier() ? std::optional<double>(actual) : std::nullopt;
        if (dequantize(pred, q.symbol, stored, e, R) != q.reconstructed) ++mismatches;
    }
    CHECK(mismatches == 0);
    CHECK(violations == 0);
    CHECK(outliers > 0);
    CHECK(outliers < 1'000'000);
}

TEST_CASE("bound holds at pathological magnitudes") {
    const double big = std::numeric_limits<double>::max() / 4;
    const double tiny = std::numeric_limits<double>::denorm_min();
    const double cases[][3] = {
        {0.0, big, 1.0},       {big, -big, 1e300},  {1e300, 1e300 + 1e285, 1e284}, {tiny, 3 * tiny, tiny},
        {0.0, 1e-310, 1e-320}, {1.0, 1.0 + 1e-16, 1e-300}, {-5.0, 7.0, 1e-15},     {1e16, 1e16 + 2, 0.5},
    };
    for (const auto& c : cases) {
        for (std::uint32_t radius : {1u, 2u, R, 1u << 24}) {
            const auto q = quantize(c[0], c[1], c[2], radius);
            CHECK(std::abs(c[1] - q.reconstructed) <= c[2]);
        }
    }
}

TEST_CASE("f32 storage rounding keeps the bound") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    std::size_t violations = 0;
    for (int i = 0; i < 200000; ++i) {
        const double actual = static_cast<float>(u(rng) * 1e4);
        const double pred = actual + u(rng) * 0.1;
        const double e = std::abs(u(rng)) * 1e-3 + 1e-6;
        const auto q = quantize(pred, actual, e, R, Precision::f32);
        if (!(std::abs(actual - round_to_precision(q.reconstructed, Precision::f32)) <= e)) ++violations;
    }
    CHECK(violations == 0);
}
