#include "srnsz/engine.hpp"

#include <bit>
#include <cstring>

#include "srnsz/byte_io.hpp"
#include "srnsz/huffman.hpp"
#include "srnsz/sparsifier.hpp"
#include "srnsz/sr_inference.hpp"

namespace srnsz {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'N', 'Z'};
constexpr std::uint8_t kFlagConstant = 1;
constexpr std::uint8_t kFlagDegraded = 2;

void put_scalar(ByteWriter& out, double v, Precision p) {
    if (p == Precision::f32) out.put<float>(static_cast<float>(v));
    else out.put<double>(v);
}

double get_scalar(ByteReader& in, Precision p) {
    return p == Precision::f32 ? static_cast<double>(in.get<float>()) : in.get<double>();
}

/// Non-final levels are quantized at half the bound so coarse values feed
/// more accurate predictions downstream.
double level_bound(const LevelPlan& plan, std::size_t level, double e) {
    return level + 1 == plan.steps.size() ? e : e / 2;
}

/// Shared predict -> correct walk over every level. `correct(flat, pred, e)`
/// returns the value the point takes in the reconstruction.
template <typename Correct>
void expand(std::span<double> buffer, const ArtifactHeader& header, const ModelBundle* model, Correct&& correct) {
    const auto ext = header.shape.padded3();
    const double e = header.error_bound.resolved_e;
    for (std::size_t level = 0; level < header.plan.steps.size(); ++level) {
        const auto& step = header.plan.steps[level];
        const double eb = level_bound(header.plan, level, e);
        if (step.kind == PredictorKind::interp) {
            interpolate_level(buffer, ext, step.stride, step.method,
                              [&](std::size_t flat, double pred) { return correct(flat, pred, eb); });
            continue;
        }
        LatticeView<double> view(buffer, ext);
        const auto faces = sr_predict_faces(*model, LatticeView<const double>(buffer, ext), step.stride,
                                            header.shape.ndims(), header.normalization);
        for (const auto& pass : parity_passes(step.stride)) {
            const bool center = pass.odd_mask == 7u;
            for_each_point(pass, ext, [&](const Index3& p, std::size_t flat) {
                const double pred = center ? predict_multidim_spline(view, p, step.stride) : faces.value(flat);
                view[flat] = correct(flat, pred, eb);
            });
        }
    }
}

DataGrid to_output(const std::vector<double>& buffer, const ArtifactHeader& header) {
    DataGrid::Values values(static_cast<Eigen::Index>(buffer.size()));
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        values[static_cast<Eigen::Index>(i)] = round_to_precision(buffer[i], header.dtype);
    }
    return DataGrid(header.shape, std::move(values), header.dtype);
}

void require_f32_exact(const DataGrid& grid) {
    if (grid.source_precision() != Precision::f32) return;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (round_to_precision(grid[i], Precision::f32) != grid[i]) {
            throw IngestionError("grid tagged f32 holds values not representable in 32 bits");
        }
    }
}

}  // namespace

CompressionResult compress(const DataGrid& grid, const ErrorBoundSpec& request, const CodecConfig& config,
                           const ModelRegistry* models) {
    if (grid.empty()) throw DomainError("cannot compress an empty grid");
    validate_stride(config.anchor_stride);
    if (config.radius < 1 || config.radius > kMaxQuantRadius) {
        throw ConfigError("quantization radius must be in [1, 2^24]");
    }
    require_f32_exact(grid);

    CompressionResult result;
    ArtifactHeader& header = result.artifact.header;
    header.dtype = grid.source_precision();
    header.shape = grid.shape();
    header.error_bound = ErrorBoundSpec::resolve(request.mode, request.epsilon, grid);

    const double range = vrange(grid);
    if (range == 0.0) {
        header.constant_field = true;
        header.constant_value = grid[0];
        result.reconstruction = grid;
        return result;
    }
    const double e = header.error_bound.resolved_e;
    if (!(e > 0.0)) throw ConfigError("error bound must resolve to e > 0 for a non-constant grid");

    header.anchor_stride = config.anchor_stride;
    header.radius = config.radius;
    header.sr_min_dim = config.sr_min_dim;
    header.normalization = {grid.values().minCoeff(), range};
    header.plan = plan_levels(grid.shape(), config.anchor_stride, config.sr_min_dim);

    const ModelBundle* model = nullptr;
    if (header.plan.uses_sr()) {
        const NoiseTier tier = select_model_tier(header.error_bound.relative_epsilon(range));
        model = models ? models->find(config.domain, tier) : nullptr;
        if (!model) {
            if (config.model_policy == ModelPolicy::strict) {
                throw ModelNotFoundError("model tier '" + to_string(tier) + "' not found");
            }
            header.degraded = true;
            for (auto& step : header.plan.steps) step.kind = PredictorKind::interp;
        } else {
            header.model_hash = model->content_hash();
            header.model_tier = model->noise_tier();
        }
    }

    const auto ext = grid.shape().padded3();
    for (auto& step : header.plan.steps) {
        if (step.kind == PredictorKind::interp) {
            result.choices.push_back(select_interpolator(grid.span(), ext, step.stride));
            step.method = result.choices.back().method;
        } else {
            step.method = InterpMethod::multidim_spline;
        }
    }

    const AnchorGrid anchors = sparsify(grid, config.anchor_stride);
    std::vector<double> buffer(grid.size(), 0.0);
    embed_anchors(buffer, grid.shape(), anchors);

    QuantizationStream stream;
    expand(buffer, header, model, [&](std::size_t flat, double pred, double eb) {
        const Quantized q = quantize(pred, grid[flat], eb, config.radius, header.dtype);
        if (q.is_outlier()) stream.outliers.push_back({stream.codes.size(), grid[flat]});
        stream.codes.push_back(q.symbol);
        return q.reconstructed;
    });

    ByteWriter body;
    body.put<std::uint64_t>(anchors.values.size());
    for (double v : anchors.values) put_scalar(body, v, header.dtype);
    write_huffman_section(body, stream.codes, 2 * config.radius);
    body.put<std::uint64_t>(stream.outliers.size());
    for (const auto& o : stream.outliers) {
        body.put_varint(o.ordinal);
        put_scalar(body, o.value, header.dtype);
    }
    result.artifact.payload = lossless_wrap(body.bytes(), config.zstd_level);
    header.payload_digest = sha256(result.artifact.payload);

    result.reconstruction = to_output(buffer, header);
    result.anchor_count = anchors.values.size();
    result.code_count = stream.codes.size();
    result.outlier_count = stream.outliers.size();
    return result;
}

DataGrid decompress(const CompressedArtifact& artifact, const ModelRegistry* models) {
    const ArtifactHeader& header = artifact.header;
    if (header.constant_field) return DataGrid::constant(header.shape, header.constant_value, header.dtype);
    if (sha256(artifact.payload) != header.payload_digest) throw CorruptStreamError("payload digest mismatch");

    const ModelBundle* model = nullptr;
    if (header.plan.uses_sr()) {
        if (!header.model_hash) throw CorruptStreamError("SR levels without a model hash");
        model = models ? models->find(*header.model_hash) : nullptr;
        if (!model) throw ModelNotFoundError("model " + to_hex(*header.model_hash) + " not found in registry");
    }

    const auto body = lossless_unwrap(artifact.payload);
    ByteReader in(body);
    AnchorGrid anchors{header.anchor_stride, anchor_shape_for(header.shape, header.anchor_stride), {}};
    const auto anchor_count = in.get<std::uint64_t>();
    if (anchor_count != anchors.anchor_shape.count()) throw CorruptStreamError("anchor count mismatch");
    anchors.values.resize(static_cast<std::size_t>(anchor_count));
    for (auto& v : anchors.values) v = get_scalar(in, header.dtype);

    const auto codes = read_huffman_section(in, 2 * header.radius);
    const auto outlier_count = in.get<std::uint64_t>();
    if (outlier_count > codes.size()) throw CorruptStreamError("more outliers than codes");
    std::vector<QuantizationStream::Outlier> outliers(static_cast<std::size_t>(outlier_count));
    for (auto& o : outliers) {
        o.ordinal = in.get_varint();
        o.value = get_scalar(in, header.dtype);
    }
    if (!in.at_end()) throw CorruptStreamError("trailing bytes in payload");

    std::vector<double> buffer(header.shape.count(), 0.0);
    embed_anchors(buffer, header.shape, anchors);
    std::size_t next_code = 0;
    std::size_t next_outlier = 0;
    expand(buffer, header, model, [&](std::size_t, double pred, double eb) {
        if (next_code >= codes.size()) throw CorruptStreamError("quantization stream too short");
        const std::uint32_t symbol = codes[next_code];
        std::optional<double> exact;
        if (symbol == kOutlierSymbol) {
            if (next_outlier >= outliers.size() || outliers[next_outlier].ordinal != next_code) {
                throw CorruptStreamError("outlier record out of order");
            }
            exact = outliers[next_outlier++].value;
        }
        ++next_code;
        return dequantize(pred, symbol, exact, eb, header.radius);
    });
    if (next_code != codes.size() || next_outlier != outliers.size()) {
        throw CorruptStreamError("quantization stream longer than the level plan");
    }
    return to_output(buffer, header);
}

DataGrid decompress(std::span<const std::uint8_t> bytes, const ModelRegistry* models) {
    return decompress(CompressedArtifact::parse(bytes), models);
}

std::vector<std::uint8_t> CompressedArtifact::serialize() const {
    ByteWriter out;
    out.put_bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
    out.put<std::uint8_t>(kContainerVersion);
    std::uint8_t flags = 0;
    if (header.constant_field) flags |= kFlagConstant;
    if (header.degraded) flags |= kFlagDegraded;
    out.put<std::uint8_t>(flags);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(header.dtype));
    out.put<std::uint8_t>(static_cast<std::uint8_t>(header.shape.ndims()));
    for (auto e : header.shape.extents()) out.put<std::uint64_t>(e);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(header.error_bound.mode));
    out.put<double>(header.error_bound.epsilon);
    out.put<double>(header.error_bound.resolved_e);
    if (header.constant_field) {
        out.put<double>(header.constant_value);
        return std::move(out).take();
    }
    out.put<std::uint32_t>(static_cast<std::uint32_t>(header.anchor_stride));
    out.put<std::uint32_t>(header.radius);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(header.sr_min_dim));
    out.put<double>(header.normalization.minimum);
    out.put<double>(header.normalization.range);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(header.plan.steps.size()));
    for (const auto& step : header.plan.steps) {
        out.put<std::uint32_t>(static_cast<std::uint32_t>(step.stride));
        out.put<std::uint8_t>(static_cast<std::uint8_t>(step.kind));
        out.put<std::uint8_t>(static_cast<std::uint8_t>(step.method));
    }
    out.put<std::uint8_t>(header.model_hash ? 1 : 0);
    if (header.model_hash) {
        out.put_bytes(*header.model_hash);
        out.put<std::uint8_t>(static_cast<std::uint8_t>(header.model_tier));
    }
    out.put_bytes(header.payload_digest);
    out.put<std::uint64_t>(payload.size());
    out.put_bytes(payload);
    return std::move(out).take();
}

CompressedArtifact CompressedArtifact::parse(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (std::memcmp(in.get_bytes(4).data(), kMagic, 4) != 0) throw CorruptStreamError("not an SRNZ artifact");
    if (in.get<std::uint8_t>() != kContainerVersion) throw CorruptStreamError("unsupported container version");
    CompressedArtifact artifact;
    ArtifactHeader& h = artifact.header;
    const auto flags = in.get<std::uint8_t>();
    if (flags & ~(kFlagConstant | kFlagDegraded)) throw CorruptStreamError("unknown header flags");
    h.constant_field = flags & kFlagConstant;
    h.degraded = flags & kFlagDegraded;
    const auto dtype = in.get<std::uint8_t>();
    if (dtype > 1) throw CorruptStreamError("unknown dtype tag");
    h.dtype = static_cast<Precision>(dtype);
    const auto ndims = in.get<std::uint8_t>();
    if (ndims < 1 || ndims > 3) throw CorruptStreamError("bad dimensionality");
    std::vector<std::size_t> extents;
    std::size_t count = 1;
    for (int d = 0; d < ndims; ++d) {
        const auto e = in.get<std::uint64_t>();
        if (e == 0 || e > (1ull << 40) || count > (1ull << 40) / e) throw CorruptStreamError("bad extent");
        count *= e;
        extents.push_back(static_cast<std::size_t>(e));
    }
    h.shape = Shape(std::move(extents));
    const auto mode = in.get<std::uint8_t>();
    if (mode > 1) throw CorruptStreamError("unknown error-bound mode");
    h.error_bound.mode = static_cast<ErrorBoundMode>(mode);
    h.error_bound.epsilon = in.get<double>();
    h.error_bound.resolved_e = in.get<double>();
    if (h.constant_field) {
        h.constant_value = in.get<double>();
        if (!std::isfinite(h.constant_value)) throw CorruptStreamError("non-finite constant");
        if (!in.at_end()) throw CorruptStreamError("trailing bytes after constant-field header");
        return artifact;
    }
    if (!(h.error_bound.resolved_e > 0.0) || !std::isfinite(h.error_bound.resolved_e)) {
        throw CorruptStreamError("bad resolved error bound");
    }
    h.anchor_stride = in.get<std::uint32_t>();
    if (h.anchor_stride < 2 || !is_power_of_two(h.anchor_stride)) throw CorruptStreamError("bad anchor stride");
    h.radius = in.get<std::uint32_t>();
    if (h.radius < 1 || h.radius > kMaxQuantRadius) throw CorruptStreamError("bad quantization radius");
    h.sr_min_dim = in.get<std::uint32_t>();
    h.normalization.minimum = in.get<double>();
    h.normalization.range = in.get<double>();

    const auto levels = in.get<std::uint8_t>();
    const auto expected = plan_levels(h.shape, h.anchor_stride, h.sr_min_dim);
    if (levels != expected.steps.size()) throw CorruptStreamError("level count does not match the anchor stride");
    h.plan = expected;
    for (auto& step : h.plan.steps) {
        if (in.get<std::uint32_t>() != step.stride) throw CorruptStreamError("level strides must halve");
        const auto kind = in.get<std::uint8_t>();
        const auto method = in.get<std::uint8_t>();
        if (kind > 1 || method > 2) throw CorruptStreamError("unknown level record");
        if (kind == 1 && step.kind != PredictorKind::sr) throw CorruptStreamError("SR level below the size threshold");
        step.kind = static_cast<PredictorKind>(kind);
        step.method = static_cast<InterpMethod>(method);
    }
    const auto model_count = in.get<std::uint8_t>();
    if (model_count > 1) throw CorruptStreamError("at most one model per artifact");
    if (model_count == 1) {
        Digest256 hash{};
        std::memcpy(hash.data(), in.get_bytes(32).data(), 32);
        h.model_hash = hash;
        const auto tier = in.get<std::uint8_t>();
        if (tier > 2) throw CorruptStreamError("unknown noise tier");
        h.model_tier = static_cast<NoiseTier>(tier);
    }
    std::memcpy(h.payload_digest.data(), in.get_bytes(32).data(), 32);
    const auto payload_size = in.get<std::uint64_t>();
    if (payload_size != in.remaining()) throw CorruptStreamError("payload length mismatch");
    const auto payload = in.get_bytes(static_cast<std::size_t>(payload_size));
    artifact.payload.assign(payload.begin(), payload.end());
    if (sha256(artifact.payload) != h.payload_digest) throw CorruptStreamError("payload digest mismatch");
    return artifact;
}

}  // namespace srnsz
