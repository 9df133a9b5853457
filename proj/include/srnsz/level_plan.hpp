#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srnsz/grid.hpp"
#include "srnsz/interp.hpp"

namespace srnsz {

inline constexpr std::size_t kDefaultAnchorStride = 32;
inline constexpr std::size_t kDefaultSrMinDim = 64;

enum class PredictorKind : std::uint8_t { interp = 0, sr = 1 };

std::string to_string(PredictorKind k);

/// One expansion level: points known at multiples of `stride` are expanded
/// to multiples of stride/2.
struct LevelStep {
    std::size_t stride = 2;
    PredictorKind kind = PredictorKind::interp;
    InterpMethod method = InterpMethod::cubic_1d;  // interp levels; SR levels use it for cube centers
    std::vector<std::size_t> input_extents;        // extents of the known subgrid the level starts from

    friend bool operator==(const LevelStep& a, const LevelStep& b) {
        return a.stride == b.stride && a.kind == b.kind && a.method == b.method;
    }
};

struct LevelPlan {
    std::vector<LevelStep> steps;

    [[nodiscard]] bool uses_sr() const noexcept {
        for (const auto& s : steps) {
            if (s.kind == PredictorKind::sr) return true;
        }
        return false;
    }
};

/// log2(anchor_stride) steps from the anchor stride down to 2. A step uses
/// the SR network only for 2D/3D grids whose known subgrid has every extent
/// >= max(sr_min_dim, 8); otherwise it interpolates.
LevelPlan plan_levels(const Shape& shape, std::size_t anchor_stride, std::size_t sr_min_dim = kDefaultSrMinDim);

}  // namespace srnsz
