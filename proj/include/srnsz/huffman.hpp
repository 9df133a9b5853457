#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srnsz/byte_io.hpp"

namespace srnsz {

/// Canonical Huffman code over symbols [0, alphabet_size).
///
/// Only code lengths are transmitted; codes are re-derived canonically by
/// sorting on (length, symbol). A stream with a single distinct symbol gets a
/// virtual padding symbol so that the code still has two one-bit leaves and
/// the Kraft sum stays exactly 1. `lengths` therefore has at least two
/// entries even for a one-symbol alphabet.
class HuffmanTable {
public:
    static constexpr unsigned kMaxCodeLength = 63;

    HuffmanTable() = default;

    /// Optimal lengths for the histogram. Equal-frequency symbols receive
    /// their lengths in ascending order of symbol value.
    static HuffmanTable from_histogram(std::span<const std::uint64_t> histogram);

    /// Rebuilds the canonical codes; throws CorruptStreamError if the lengths
    /// oversubscribe the code space or exceed kMaxCodeLength.
    static HuffmanTable from_lengths(std::vector<std::uint8_t> lengths, std::uint32_t alphabet_size);

    [[nodiscard]] std::uint32_t alphabet_size() const noexcept { return alphabet_size_; }
    [[nodiscard]] const std::vector<std::uint8_t>& lengths() const noexcept { return lengths_; }
    [[nodiscard]] const std::vector<std::uint64_t>& codes() const noexcept { return codes_; }

    /// Sum of 2^-len over coded symbols, computed exactly in 2^-kMaxCodeLength units.
    [[nodiscard]] double kraft_sum() const;

    void serialize(ByteWriter& out) const;
    static HuffmanTable deserialize(ByteReader& in);

    friend bool operator==(const HuffmanTable& a, const HuffmanTable& b) {
        return a.alphabet_size_ == b.alphabet_size_ && a.lengths_ == b.lengths_;
    }

private:
    friend class HuffmanDecoder;
    void assign_codes();

    std::uint32_t alphabet_size_ = 0;
    std::vector<std::uint8_t> lengths_;
    std::vector<std::uint64_t> codes_;  // MSB-first code values
};

struct HuffmanEncoded {
    HuffmanTable table;
    std::vector<std::uint8_t> bits;  // LSB-first packed
    std::uint64_t bit_count = 0;
};

HuffmanEncoded huffman_encode(std::span<const std::uint32_t> symbols, std::uint32_t alphabet_size);

/// Decodes exactly `count` symbols; throws CorruptStreamError when the stream
/// runs out or contains a bit pattern no code matches.
std::vector<std::uint32_t> huffman_decode(const HuffmanTable& table, std::span<const std::uint8_t> bits,
                                          std::uint64_t bit_count, std::size_t count);

/// Container layout: [u32 symbol-count][length-table][u64 bit-count][bits].
void write_huffman_section(ByteWriter& out, std::span<const std::uint32_t> symbols,
                           std::uint32_t alphabet_size);
std::vector<std::uint32_t> read_huffman_section(ByteReader& in, std::uint32_t alphabet_size);

}  // namespace srnsz
