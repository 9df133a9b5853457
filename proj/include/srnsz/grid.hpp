#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srnsz/error.hpp"

namespace srnsz {

/// On-disk element width of a grid.
enum class Precision : std::uint8_t { f32 = 0, f64 = 1 };

constexpr unsigned element_bits(Precision p) noexcept { return p == Precision::f32 ? 32 : 64; }
constexpr std::size_t element_bytes(Precision p) noexcept { return element_bits(p) / 8; }

/// Rounds a 64-bit value through the storage precision.
constexpr double round_to_precision(double v, Precision p) noexcept {
    return p == Precision::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

std::string to_string(Precision p);
Precision precision_from_string(const std::string& s);

/// Row-major extents of a 1-, 2- or 3-dimensional grid.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> extents) : Shape(std::vector<std::size_t>(extents)) {}
    explicit Shape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
        if (extents_.empty() || extents_.size() > 3) {
            throw DomainError("grid must have 1, 2 or 3 dimensions");
        }
        for (auto e : extents_) {
            if (e == 0) throw DomainError("grid extents must be >= 1");
        }
    }

    [[nodiscard]] std::size_t ndims() const noexcept { return extents_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t d) const { return extents_.at(d); }
    [[nodiscard]] const std::vector<std::size_t>& extents() const noexcept { return extents_; }

    [[nodiscard]] std::size_t count() const noexcept {
        return std::accumulate(extents_.begin(), extents_.end(), std::size_t{1},
                               std::multiplies<>{});
    }

    /// Extents left-padded with 1s to three axes. Row-major flat indices are
    /// unchanged by the padding, so lattice code can always work in 3D.
    [[nodiscard]] std::array<std::size_t, 3> padded3() const noexcept {
        std::array<std::size_t, 3> out{1, 1, 1};
        const std::size_t offset = 3 - extents_.size();
        for (std::size_t d = 0; d < extents_.size(); ++d) out[offset + d] = extents_[d];
        return out;
    }

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> extents_;
};

std::string to_string(const Shape& shape);

/// Dense N-dimensional grid of samples in row-major order.
///
/// Values are always finite: construction rejects NaN and infinities with an
/// IngestionError. `source_precision` records the on-disk width the values
/// came from (and will be written back as); it does not change the in-memory
/// scalar type.
template <typename Scalar>
class Grid {
public:
    using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    Grid() = default;

    Grid(Shape shape, Values values, Precision source_precision = Precision::f64)
        : shape_(std::move(shape)), values_(std::move(values)), precision_(source_precision) {
        if (static_cast<std::size_t>(values_.size()) != shape_.count()) {
            throw DomainError("grid of shape " + to_string(shape_) + " expects " +
                              std::to_string(shape_.count()) + " values, got " +
                              std::to_string(values_.size()));
        }
        if (!values_.allFinite()) throw IngestionError("grid contains NaN or infinite values");
    }

    Grid(Shape shape, const std::vector<Scalar>& values, Precision source_precision = Precision::f64)
        : Grid(std::move(shape),
               Eigen::Map<const Values>(values.data(), static_cast<Eigen::Index>(values.size())),
               source_precision) {}

    static Grid constant(Shape shape, Scalar value, Precision source_precision = Precision::f64) {
        const auto n = static_cast<Eigen::Index>(shape.count());
        return Grid(std::move(shape), Values::Constant(n, value), source_precision);
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t ndims() const noexcept { return shape_.ndims(); }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    [[nodiscard]] bool empty() const noexcept { return values_.size() == 0; }
    [[nodiscard]] Precision source_precision() const noexcept { return precision_; }
    [[nodiscard]] const Values& values() const noexcept { return values_; }
    [[nodiscard]] std::span<const Scalar> span() const noexcept {
        return {values_.data(), static_cast<std::size_t>(values_.size())};
    }
    [[nodiscard]] Scalar operator[](std::size_t flat) const { return values_[static_cast<Eigen::Index>(flat)]; }

private:
    Shape shape_;
    Values values_;
    Precision precision_ = Precision::f64;
};

using DataGrid = Grid<double>;

/// max(values) - min(values).
template <typename Scalar>
Scalar vrange(const Grid<Scalar>& grid) {
    if (grid.empty()) throw DomainError("vrange of an empty grid");
    return grid.values().maxCoeff() - grid.values().minCoeff();
}

struct NormalizationParams {
    double minimum = 0.0;
    double range = 0.0;
};

/// Affine map onto [0, 1]. A constant grid maps to all zeros and the params
/// record the constant as `minimum` with `range == 0`.
template <typename Scalar>
std::pair<Grid<Scalar>, NormalizationParams> normalize(const Grid<Scalar>& grid) {
    if (grid.empty()) throw DomainError("normalize of an empty grid");
    const Scalar lo = grid.values().minCoeff();
    const Scalar range = grid.values().maxCoeff() - lo;
    NormalizationParams params{static_cast<double>(lo), static_cast<double>(range)};
    if (range == Scalar(0)) {
        return {Grid<Scalar>::constant(grid.shape(), Scalar(0), grid.source_precision()), params};
    }
    typename Grid<Scalar>::Values out = (grid.values() - lo) / range;
    return {Grid<Scalar>(grid.shape(), std::move(out), grid.source_precision()), params};
}

template <typename Scalar>
Grid<Scalar> denormalize(const Grid<Scalar>& grid, const NormalizationParams& params) {
    const auto lo = static_cast<Scalar>(params.minimum);
    const auto range = static_cast<Scalar>(params.range);
    if (range == Scalar(0)) return Grid<Scalar>::constant(grid.shape(), lo, grid.source_precision());
    typename Grid<Scalar>::Values out = grid.values() * range + lo;
    return Grid<Scalar>(grid.shape(), std::move(out), grid.source_precision());
}

enum class ErrorBoundMode : std::uint8_t { absolute = 0, value_range_relative = 1 };

std::string to_string(ErrorBoundMode m);
ErrorBoundMode error_bound_mode_from_string(const std::string& s);

/// A user's error-bound request together with the absolute bound it resolves to.
struct ErrorBoundSpec {
    ErrorBoundMode mode = ErrorBoundMode::value_range_relative;
    double epsilon = 0.0;
    double resolved_e = 0.0;

    /// e = epsilon for absolute requests, epsilon * vrange(grid) otherwise.
    static ErrorBoundSpec resolve(ErrorBoundMode mode, double epsilon, const DataGrid& grid);

    /// epsilon expressed relative to the value range, whichever mode was requested.
    [[nodiscard]] double relative_epsilon(double value_range) const noexcept {
        if (mode == ErrorBoundMode::value_range_relative) return epsilon;
        return value_range > 0 ? resolved_e / value_range : 0.0;
    }
};

}  // namespace srnsz
