#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srnsz/grid.hpp"

namespace srnsz {

constexpr bool is_power_of_two(std::size_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

/// Number of stride-aligned indices in [0, extent).
constexpr std::size_t anchor_extent(std::size_t extent, std::size_t stride) noexcept {
    return (extent - 1) / stride + 1;
}

/// Losslessly kept samples at every index vector whose components are all
/// multiples of `stride`, stored row-major over `anchor_shape`.
struct AnchorGrid {
    std::size_t stride = 32;
    Shape anchor_shape;
    std::vector<double> values;
};

Shape anchor_shape_for(const Shape& shape, std::size_t stride);

/// Throws ConfigError unless stride is a power of two >= 2.
void validate_stride(std::size_t stride);

AnchorGrid sparsify(const DataGrid& grid, std::size_t stride);

/// Copy of `target` with anchor values written at the stride-aligned indices.
DataGrid embed_anchors(const DataGrid& target, const AnchorGrid& anchors);

/// In-place variant over a raw row-major buffer of the given shape.
void embed_anchors(std::span<double> buffer, const Shape& shape, const AnchorGrid& anchors);

}  // namespace srnsz
