#include "srnsz/level_plan.hpp"

#include <algorithm>

#include "srnsz/sparsifier.hpp"
#include "srnsz/sr_inference.hpp"

namespace srnsz {

std::string to_string(PredictorKind k) { return k == PredictorKind::sr ? "sr" : "interp"; }

LevelPlan plan_levels(const Shape& shape, std::size_t anchor_stride, std::size_t sr_min_dim) {
    validate_stride(anchor_stride);
    const std::size_t threshold = std::max<std::size_t>(sr_min_dim, static_cast<std::size_t>(kMinSrExtent));
    LevelPlan plan;
    for (std::size_t stride = anchor_stride; stride >= 2; stride /= 2) {
        LevelStep step;
        step.stride = stride;
        bool all_large = shape.ndims() >= 2;
        for (auto n : shape.extents()) {
            step.input_extents.push_back(anchor_extent(n, stride));
            all_large = all_large && step.input_extents.back() >= threshold;
        }
        step.kind = all_large ? PredictorKind::sr : PredictorKind::interp;
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

}  // namespace srnsz
