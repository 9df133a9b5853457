#pragma once

#include <cmath>
#include <random>

#include "srnsz/grid.hpp"

namespace srnsz::testing {

/// Smooth separable-plus-noise field stored as f32.
inline DataGrid wavy(const Shape& shape, std::uint64_t seed = 1, double noise = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto ext = shape.padded3();
    std::vector<double> v(shape.count());
    const double a = u(rng), b = u(rng), c = u(rng);
    std::size_t f = 0;
    for (std::size_t i = 0; i < ext[0]; ++i)
        for (std::size_t j = 0; j < ext[1]; ++j)
            for (std::size_t k = 0; k < ext[2]; ++k) {
                const double x = std::sin(0.11 * i + a) * std::cos(0.07 * j + b) + 0.5 * std::sin(0.13 * k + c) +
                                 0.002 * double(i + j) + noise * u(rng);
                v[f++] = static_cast<float>(x);
            }
    return DataGrid(shape, v, Precision::f32);
}

inline DataGrid white_noise(const Shape& shape, std::uint64_t seed, Precision p = Precision::f64) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-100, 100);
    std::vector<double> v(shape.count());
    for (auto& x : v) x = round_to_precision(u(rng), p);
    return DataGrid(shape, v, p);
}

}  // namespace srnsz::testing
