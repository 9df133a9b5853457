#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <span>
#include <vector>

#include "srnsz/grid.hpp"

namespace srnsz {

using Index3 = std::array<std::size_t, 3>;

/// Three-axis view of a row-major buffer (leading axes padded with extent 1).
template <typename Scalar>
class LatticeView {
public:
    LatticeView(std::span<Scalar> data, Index3 extents)
        : data_(data), ext_(extents), strides_{extents[1] * extents[2], extents[2], 1} {}

    [[nodiscard]] const Index3& extents() const noexcept { return ext_; }
    [[nodiscard]] std::size_t extent(std::size_t axis) const noexcept { return ext_[axis]; }
    [[nodiscard]] std::size_t stride(std::size_t axis) const noexcept { return strides_[axis]; }
    [[nodiscard]] std::size_t flat(const Index3& p) const noexcept {
        return p[0] * strides_[0] + p[1] * strides_[1] + p[2];
    }
    [[nodiscard]] Scalar& operator[](std::size_t flat) const noexcept { return data_[flat]; }
    [[nodiscard]] Scalar& at(const Index3& p) const noexcept { return data_[flat(p)]; }
    [[nodiscard]] std::span<Scalar> data() const noexcept { return data_; }

private:
    std::span<Scalar> data_;
    Index3 ext_;
    Index3 strides_;
};

/// Iteration range along one axis: start, start + step, ... < extent.
struct AxisRange {
    std::size_t start = 0;
    std::size_t step = 1;
};

/// One parity class of an expansion level, visited in row-major order.
///
/// `predict_axis` is the axis a dimension-sequential pass interpolates along;
/// it is -1 for parity-pattern passes, where every odd axis contributes.
struct Pass {
    std::array<AxisRange, 3> axes{};
    unsigned odd_mask = 0;  // bit a set: coordinate on axis a is an odd multiple of stride/2
    int predict_axis = -1;
};

/// Passes of a dimension-sequential level: for axis d = 0, 1, 2, points odd on
/// d, already-refined (any multiple of stride/2) on earlier axes and even
/// (multiple of stride) on later axes.
inline std::vector<Pass> sequential_passes(std::size_t stride) {
    const std::size_t half = stride / 2;
    std::vector<Pass> passes;
    for (int d = 0; d < 3; ++d) {
        Pass pass;
        pass.predict_axis = d;
        pass.odd_mask = 1u << d;
        for (int a = 0; a < 3; ++a) {
            if (a < d) pass.axes[a] = {0, half};
            else if (a == d) pass.axes[a] = {half, stride};
            else pass.axes[a] = {0, stride};
        }
        passes.push_back(pass);
    }
    return passes;
}

/// Passes ordered by number of odd coordinates, then by mask value. Points in
/// one pass only depend on points with fewer odd coordinates.
inline std::vector<Pass> parity_passes(std::size_t stride) {
    const std::size_t half = stride / 2;
    std::vector<Pass> passes;
    for (int odd_count = 1; odd_count <= 3; ++odd_count) {
        for (unsigned mask = 1; mask < 8; ++mask) {
            if (std::popcount(mask) != odd_count) continue;
            Pass pass;
            pass.odd_mask = mask;
            for (int a = 0; a < 3; ++a) {
                pass.axes[a] = (mask >> a & 1u) ? AxisRange{half, stride} : AxisRange{0, stride};
            }
            passes.push_back(pass);
        }
    }
    return passes;
}

/// Calls fn(point, flat) for every point of the pass inside `extents`.
template <typename Fn>
void for_each_point(const Pass& pass, const Index3& extents, Fn&& fn) {
    const std::size_t s1 = extents[1] * extents[2];
    const std::size_t s2 = extents[2];
    for (std::size_t i = pass.axes[0].start; i < extents[0]; i += pass.axes[0].step) {
        for (std::size_t j = pass.axes[1].start; j < extents[1]; j += pass.axes[1].step) {
            for (std::size_t k = pass.axes[2].start; k < extents[2]; k += pass.axes[2].step) {
                fn(Index3{i, j, k}, i * s1 + j * s2 + k);
            }
        }
    }
}

inline std::size_t count_points(const Pass& pass, const Index3& extents) {
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) {
        const auto& r = pass.axes[a];
        n *= r.start < extents[a] ? (extents[a] - 1 - r.start) / r.step + 1 : 0;
    }
    return n;
}

/// Whether coordinate `c` is an odd multiple of stride/2.
constexpr bool is_odd_at(std::size_t c, std::size_t stride) noexcept { return c % stride == stride / 2; }

}  // namespace srnsz
