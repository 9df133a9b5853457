#pragma once

#include <cstdint>
#include <vector>

#include "srnsz/bundle.hpp"

namespace srnsz {

/// Hand-constructed bundles whose behavior is known analytically. They let
/// the SR path run without a trained model.

/// conv(1->4, 1x1) with all-zero weights and biases: output is identically 0.
std::vector<std::uint8_t> zero_bundle(NoiseTier tier = NoiseTier::none);

/// Each input pixel copied into its 2x2 output block.
std::vector<std::uint8_t> nearest_bundle(NoiseTier tier = NoiseTier::none);

/// Bilinear 2x upsampling with output (2y, 2x) coinciding with input (y, x);
/// the last output row/column is extrapolated against zero padding.
std::vector<std::uint8_t> bilinear_bundle(NoiseTier tier = NoiseTier::none);

struct MiniatureSpec {
    int channels = 32;
    int residual_blocks = 4;
    bool channel_attention = true;
    int attention_reduction = 4;
    std::uint64_t seed = 1;
};

/// Randomly initialized network with the default shape the trainer emits:
/// 3x3 conv (1->C), residual blocks (conv-act-conv [+attention] + skip),
/// 3x3 conv (C->4), pixel_shuffle(2).
std::vector<std::uint8_t> miniature_bundle(const MiniatureSpec& spec, NoiseTier tier = NoiseTier::none);

}  // namespace srnsz
