#include "srnsz/lossless.hpp"

#include <zstd.h>

#include <memory>
#include <string>

#include "srnsz/error.hpp"

namespace srnsz {

namespace {
// Refuse frames that claim more than 64 GiB of content.
constexpr unsigned long long kMaxFrameContent = 1ull << 36;
}  // namespace

std::vector<std::uint8_t> lossless_wrap(std::span<const std::uint8_t> payload, int level) {
    if (level < ZSTD_minCLevel() || level > ZSTD_maxCLevel()) {
        throw ConfigError("zstd level " + std::to_string(level) + " out of range");
    }
    std::unique_ptr<ZSTD_CCtx, decltype(&ZSTD_freeCCtx)> ctx(ZSTD_createCCtx(), ZSTD_freeCCtx);
    if (!ctx) throw Error("zstd context allocation failed");
    ZSTD_CCtx_setParameter(ctx.get(), ZSTD_c_compressionLevel, level);
    ZSTD_CCtx_setParameter(ctx.get(), ZSTD_c_checksumFlag, 1);
    std::vector<std::uint8_t> out(ZSTD_compressBound(payload.size()));
    const std::size_t n = ZSTD_compress2(ctx.get(), out.data(), out.size(), payload.data(), payload.size());
    if (ZSTD_isError(n)) throw Error(std::string("zstd compression failed: ") + ZSTD_getErrorName(n));
    out.resize(n);
    return out;
}

std::vector<std::uint8_t> lossless_unwrap(std::span<const std::uint8_t> frame) {
    const unsigned long long size = ZSTD_getFrameContentSize(frame.data(), frame.size());
    if (size == ZSTD_CONTENTSIZE_ERROR || size == ZSTD_CONTENTSIZE_UNKNOWN || size > kMaxFrameContent) {
        throw CorruptStreamError("malformed zstd frame header");
    }
    const std::size_t frame_size = ZSTD_findFrameCompressedSize(frame.data(), frame.size());
    if (ZSTD_isError(frame_size) || frame_size != frame.size()) {
        throw CorruptStreamError("zstd frame truncated or followed by trailing bytes");
    }
    std::vector<std::uint8_t> out(static_cast<std::size_t>(size));
    const std::size_t n = ZSTD_decompress(out.data(), out.size(), frame.data(), frame.size());
    if (ZSTD_isError(n) || n != out.size()) {
        throw CorruptStreamError(std::string("zstd decompression failed: ") +
                                 (ZSTD_isError(n) ? ZSTD_getErrorName(n) : "size mismatch"));
    }
    return out;
}

}  // namespace srnsz
