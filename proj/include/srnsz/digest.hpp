#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace srnsz {

/// 256-bit SHA-256 digest; used for model content hashes and payload digests.
using Digest256 = std::array<std::uint8_t, 32>;

Digest256 sha256(std::span<const std::uint8_t> data);

std::string to_hex(const Digest256& digest);

/// Parses 64 hex characters; throws DomainError otherwise.
Digest256 digest_from_hex(const std::string& hex);

}  // namespace srnsz
