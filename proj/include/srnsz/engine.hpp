#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srnsz/bundle.hpp"
#include "srnsz/grid.hpp"
#include "srnsz/level_plan.hpp"
#include "srnsz/lossless.hpp"
#include "srnsz/quantizer.hpp"
#include "srnsz/registry.hpp"

namespace srnsz {

enum class ModelPolicy : std::uint8_t {
    degrade,  // fall back to interpolation when the wanted tier is missing
    strict,   // raise ModelNotFoundError instead
};

struct CodecConfig {
    std::size_t anchor_stride = kDefaultAnchorStride;
    std::size_t sr_min_dim = kDefaultSrMinDim;
    std::uint32_t radius = kDefaultQuantRadius;
    int zstd_level = kDefaultZstdLevel;
    ModelPolicy model_policy = ModelPolicy::degrade;
    std::string domain = kDefaultDomain;
};

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::uint32_t kMaxQuantRadius = 1u << 24;

/// Everything needed to replay the expansion, stored ahead of the payload.
///
/// Layout (little-endian): "SRNZ", u8 version, u8 flags (1 = constant field,
/// 2 = degraded to interpolation), u8 dtype, u8 ndims, u64 extents, u8 eb
/// mode, f64 epsilon, f64 resolved e. A constant field ends with the f64
/// constant. Otherwise: u32 anchor stride, u32 radius, u32 sr_min_dim, f64
/// normalization minimum and range, u8 level count with (u32 stride, u8
/// predictor kind, u8 interpolation method) per level, u8 model count with
/// (32-byte content hash, u8 noise tier) per model, 32-byte SHA-256 of the
/// payload, u64 payload length, payload.
struct ArtifactHeader {
    Precision dtype = Precision::f32;
    Shape shape;
    ErrorBoundSpec error_bound;
    bool constant_field = false;
    double constant_value = 0.0;
    bool degraded = false;
    std::size_t anchor_stride = kDefaultAnchorStride;
    std::uint32_t radius = kDefaultQuantRadius;
    std::size_t sr_min_dim = kDefaultSrMinDim;
    NormalizationParams normalization;
    LevelPlan plan;
    std::optional<Digest256> model_hash;
    NoiseTier model_tier = NoiseTier::none;
    Digest256 payload_digest{};
};

/// Header plus Zstandard frame over (anchors | Huffman section | outliers).
struct CompressedArtifact {
    ArtifactHeader header;
    std::vector<std::uint8_t> payload;

    [[nodiscard]] std::vector<std::uint8_t> serialize() const;

    /// Parses and verifies the payload digest; throws CorruptStreamError.
    static CompressedArtifact parse(std::span<const std::uint8_t> bytes);
};

struct CompressionResult {
    CompressedArtifact artifact;
    DataGrid reconstruction;  // identical to what decompress() will return
    std::size_t anchor_count = 0;
    std::size_t code_count = 0;
    std::size_t outlier_count = 0;
    std::vector<InterpChoice> choices;  // one per interpolation level, in level order
};

/// Error-bounded compression. The bound is resolved against `grid` from
/// `request.mode` and `request.epsilon` (request.resolved_e is ignored), and
/// every reconstructed value, after rounding to the grid's source precision,
/// lies within it.
CompressionResult compress(const DataGrid& grid, const ErrorBoundSpec& request, const CodecConfig& config = {},
                           const ModelRegistry* models = nullptr);

DataGrid decompress(const CompressedArtifact& artifact, const ModelRegistry* models = nullptr);
DataGrid decompress(std::span<const std::uint8_t> bytes, const ModelRegistry* models = nullptr);

}  // namespace srnsz
