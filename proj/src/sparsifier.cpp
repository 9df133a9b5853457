#include "srnsz/sparsifier.hpp"

#include <string>

namespace srnsz {

namespace {

template <typename Fn>
void for_each_anchor(const Shape& shape, std::size_t stride, Fn&& fn) {
    const auto ext = shape.padded3();
    std::size_t ordinal = 0;
    for (std::size_t i = 0; i < ext[0]; i += stride) {
        for (std::size_t j = 0; j < ext[1]; j += stride) {
            for (std::size_t k = 0; k < ext[2]; k += stride) {
                fn(ordinal++, (i * ext[1] + j) * ext[2] + k);
            }
        }
    }
}

}  // namespace

void validate_stride(std::size_t stride) {
    if (stride < 2 || !is_power_of_two(stride)) {
        throw ConfigError("anchor stride must be a power of two >= 2, got " + std::to_string(stride));
    }
}

Shape anchor_shape_for(const Shape& shape, std::size_t stride) {
    std::vector<std::size_t> extents;
    for (auto e : shape.extents()) extents.push_back(anchor_extent(e, stride));
    return Shape(std::move(extents));
}

AnchorGrid sparsify(const DataGrid& grid, std::size_t stride) {
    validate_stride(stride);
    if (grid.empty()) throw DomainError("sparsify of an empty grid");
    AnchorGrid anchors{stride, anchor_shape_for(grid.shape(), stride), {}};
    anchors.values.resize(anchors.anchor_shape.count());
    for_each_anchor(grid.shape(), stride,
                    [&](std::size_t ordinal, std::size_t flat) { anchors.values[ordinal] = grid[flat]; });
    return anchors;
}

void embed_anchors(std::span<double> buffer, const Shape& shape, const AnchorGrid& anchors) {
    validate_stride(anchors.stride);
    if (buffer.size() != shape.count() || shape.ndims() != anchors.anchor_shape.ndims() ||
        anchor_shape_for(shape, anchors.stride) != anchors.anchor_shape ||
        anchors.values.size() != anchors.anchor_shape.count()) {
        throw DomainError("anchor grid " + to_string(anchors.anchor_shape) +
                          " is inconsistent with target shape " + to_string(shape));
    }
    for_each_anchor(shape, anchors.stride,
                    [&](std::size_t ordinal, std::size_t flat) { buffer[flat] = anchors.values[ordinal]; });
}

DataGrid embed_anchors(const DataGrid& target, const AnchorGrid& anchors) {
    DataGrid::Values values = target.values();
    embed_anchors(std::span<double>(values.data(), static_cast<std::size_t>(values.size())),
                  target.shape(), anchors);
    return DataGrid(target.shape(), std::move(values), target.source_precision());
}

}  // namespace srnsz
