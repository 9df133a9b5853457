#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "srnsz/lattice.hpp"

namespace srnsz {

/// Interpolation method used for one expansion level (one byte in the container).
enum class InterpMethod : std::uint8_t { linear = 0, cubic_1d = 1, multidim_spline = 2 };

std::string to_string(InterpMethod m);

/// Per-level selection outcome together with the measured squared errors.
struct InterpChoice {
    InterpMethod method = InterpMethod::cubic_1d;
    double sse_linear = 0.0;
    double sse_cubic = 0.0;
    double sse_multidim = 0.0;
    std::size_t sampled_points = 0;
};

/// Cubic midpoint from f(x-3s), f(x-s), f(x+s), f(x+3s); exact for degree <= 3.
constexpr double predict_cubic_midpoint(double m3, double m1, double p1, double p3) noexcept {
    return (-m3 + 9.0 * m1 + 9.0 * p1 - p3) / 16.0;
}

constexpr double predict_linear_midpoint(double a, double b) noexcept { return (a + b) / 2.0; }

/// Quadratic through f(x-3s), f(x-s), f(x+s), evaluated at x.
constexpr double predict_quadratic_left(double m3, double m1, double p1) noexcept {
    return (-m3 + 6.0 * m1 + 3.0 * p1) / 8.0;
}

/// Quadratic through f(x-s), f(x+s), f(x+3s), evaluated at x.
constexpr double predict_quadratic_right(double m1, double p1, double p3) noexcept {
    return (3.0 * m1 + 6.0 * p1 - p3) / 8.0;
}

/// 1D prediction of point `p` along `axis` with neighbors at +-half and
/// +-3*half. Stencils that leave the grid degrade cubic -> quadratic ->
/// linear -> copy of the left neighbor (which always exists because
/// p[axis] >= half).
template <typename Scalar>
double predict_along_axis(const LatticeView<Scalar>& view, const Index3& p, int axis,
                          std::size_t half, bool cubic) {
    const std::size_t c = p[axis];
    const std::size_t n = view.extent(axis);
    const std::size_t st = view.stride(axis);
    const std::size_t base = view.flat(p);
    const double m1 = view[base - half * st];
    if (c + half >= n) return m1;
    const double p1 = view[base + half * st];
    if (!cubic) return predict_linear_midpoint(m1, p1);
    const bool has_m3 = c >= 3 * half;
    const bool has_p3 = c + 3 * half < n;
    if (has_m3 && has_p3) {
        return predict_cubic_midpoint(view[base - 3 * half * st], m1, p1, view[base + 3 * half * st]);
    }
    if (has_m3) return predict_quadratic_left(view[base - 3 * half * st], m1, p1);
    if (has_p3) return predict_quadratic_right(m1, p1, view[base + 3 * half * st]);
    return predict_linear_midpoint(m1, p1);
}

/// Mean of the per-axis cubic predictions over every axis on which `p` is an
/// odd multiple of stride/2 (all axes for a cube-center point).
template <typename Scalar>
double predict_multidim_spline(const LatticeView<Scalar>& view, const Index3& p, std::size_t stride) {
    const std::size_t half = stride / 2;
    double sum = 0.0;
    int axes = 0;
    for (int a = 0; a < 3; ++a) {
        if (!is_odd_at(p[a], stride)) continue;
        sum += predict_along_axis(view, p, a, half, true);
        ++axes;
    }
    return axes ? sum / axes : view.at(p);
}

/// Passes visited by a level that uses `method`.
inline std::vector<Pass> passes_for(InterpMethod method, std::size_t stride) {
    return method == InterpMethod::multidim_spline ? parity_passes(stride) : sequential_passes(stride);
}

template <typename Scalar>
double predict_interp_point(const LatticeView<Scalar>& view, const Pass& pass, const Index3& p,
                            std::size_t stride, InterpMethod method) {
    if (method == InterpMethod::multidim_spline) return predict_multidim_spline(view, p, stride);
    return predict_along_axis(view, p, pass.predict_axis, stride / 2, method == InterpMethod::cubic_1d);
}

/// Runs one interpolation level over `buffer`: for each point in emission
/// order, predicts from the buffer and stores `correct(flat, prediction)`.
/// The same routine drives compression and decompression, which is what
/// makes their reconstructions identical.
template <typename Correct>
void interpolate_level(std::span<double> buffer, const Index3& extents, std::size_t stride,
                       InterpMethod method, Correct&& correct) {
    LatticeView<double> view(buffer, extents);
    for (const auto& pass : passes_for(method, stride)) {
        for_each_point(pass, extents, [&](const Index3& p, std::size_t flat) {
            view[flat] = correct(flat, predict_interp_point(view, pass, p, stride, method));
        });
    }
}

/// Points sampled by select_interpolator when a level is large.
inline constexpr std::size_t kSelectionSampleTarget = 16384;

/// Chooses the method with the smallest summed squared prediction error on
/// the level's new points, predicting from `reference` (compression side
/// only). Levels with more than kSelectionSampleTarget points are evaluated on
/// a hash-selected subset of at least 1000 points, identical for every
/// candidate. Ties go to cubic_1d, then linear, then multidim_spline.
InterpChoice select_interpolator(std::span<const double> reference, const Index3& extents,
                                 std::size_t stride);

}  // namespace srnsz
