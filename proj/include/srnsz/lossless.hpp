#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srnsz {

inline constexpr int kDefaultZstdLevel = 3;

/// One standard Zstandard frame (RFC 8878) holding `payload`, with the
/// optional content checksum enabled.
std::vector<std::uint8_t> lossless_wrap(std::span<const std::uint8_t> payload, int level = kDefaultZstdLevel);

/// Inverse of lossless_wrap. The input must be exactly one frame with a
/// declared content size; anything else raises CorruptStreamError.
std::vector<std::uint8_t> lossless_unwrap(std::span<const std::uint8_t> frame);

}  // namespace srnsz
