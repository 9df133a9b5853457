#include "srnsz/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "srnsz/error.hpp"

namespace srnsz {

namespace {

constexpr unsigned kLookupBits = 12;

std::uint64_t reverse_bits(std::uint64_t code, unsigned length) {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < length; ++i) {
        r = (r << 1) | (code & 1u);
        code >>= 1;
    }
    return r;
}

}  // namespace

HuffmanTable HuffmanTable::from_histogram(std::span<const std::uint64_t> histogram) {
    HuffmanTable table;
    table.alphabet_size_ = static_cast<std::uint32_t>(histogram.size());
    table.lengths_.assign(std::max<std::size_t>(histogram.size(), 2), 0);

    std::vector<std::uint32_t> used;
    for (std::uint32_t s = 0; s < histogram.size(); ++s) {
        if (histogram[s] > 0) used.push_back(s);
    }
    if (used.empty()) {
        table.assign_codes();
        return table;
    }
    if (used.size() == 1) {
        const std::uint32_t pad = used[0] == 0 ? 1u : 0u;
        table.lengths_[used[0]] = 1;
        table.lengths_[pad] = 1;
        table.assign_codes();
        return table;
    }

    // Classic two-at-a-time merge. Node ids: leaves 0..m-1 (index into
    // `used`), internal nodes m, m+1, ... in creation order.
    const std::size_t m = used.size();
    std::vector<std::size_t> parent(2 * m - 1, 0);
    using Item = std::pair<std::uint64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t i = 0; i < m; ++i) heap.emplace(histogram[used[i]], i);
    std::size_t next = m;
    while (heap.size() > 1) {
        const auto [wa, a] = heap.top();
        heap.pop();
        const auto [wb, b] = heap.top();
        heap.pop();
        parent[a] = next;
        parent[b] = next;
        heap.emplace(wa + wb, next++);
    }
    std::vector<unsigned> depth(2 * m - 1, 0);
    for (std::size_t node = 2 * m - 2; node-- > 0;) depth[node] = depth[parent[node]] + 1;

    // Within each equal-frequency class hand the shorter lengths to the
    // smaller symbols; the multiset of lengths per class is unchanged, so
    // the code stays optimal.
    std::map<std::uint64_t, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < m; ++i) classes[histogram[used[i]]].push_back(i);
    for (auto& [weight, members] : classes) {
        std::vector<unsigned> lens;
        for (auto i : members) lens.push_back(depth[i]);
        std::sort(lens.begin(), lens.end());
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (lens[k] > kMaxCodeLength) throw Error("Huffman code length exceeds 63 bits");
            table.lengths_[used[members[k]]] = static_cast<std::uint8_t>(lens[k]);
        }
    }
    table.assign_codes();
    return table;
}

HuffmanTable HuffmanTable::from_lengths(std::vector<std::uint8_t> lengths, std::uint32_t alphabet_size) {
    if (lengths.size() != std::max<std::size_t>(alphabet_size, 2)) {
        throw CorruptStreamError("Huffman length table does not match the alphabet");
    }
    HuffmanTable table;
    table.alphabet_size_ = alphabet_size;
    table.lengths_ = std::move(lengths);
    // Kraft <= 1 in units of 2^-63.
    // Each term is at most 2^62, so the sum cannot wrap before the check fires.
    constexpr std::uint64_t kCapacity = std::uint64_t{1} << kMaxCodeLength;
    std::uint64_t kraft = 0;
    for (auto len : table.lengths_) {
        if (len > kMaxCodeLength) throw CorruptStreamError("Huffman code length exceeds 63 bits");
        if (len) kraft += std::uint64_t{1} << (kMaxCodeLength - len);
        if (kraft > kCapacity) throw CorruptStreamError("Huffman lengths oversubscribe the code space");
    }
    table.assign_codes();
    return table;
}

void HuffmanTable::assign_codes() {
    codes_.assign(lengths_.size(), 0);
    std::vector<std::uint32_t> order;
    for (std::uint32_t s = 0; s < lengths_.size(); ++s) {
        if (lengths_[s]) order.push_back(s);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return lengths_[a] < lengths_[b]; });
    std::uint64_t code = 0;
    unsigned prev = 0;
    for (auto s : order) {
        code <<= (lengths_[s] - prev);
        prev = lengths_[s];
        codes_[s] = code++;
    }
}

double HuffmanTable::kraft_sum() const {
    double kraft = 0.0;
    for (auto len : lengths_) {
        if (len) kraft += std::ldexp(1.0, -static_cast<int>(len));
    }
    return kraft;
}

// Length table: u32 alphabet size, then (u8 length, varint run) pairs
// covering max(alphabet, 2) entries.
void HuffmanTable::serialize(ByteWriter& out) const {
    out.put<std::uint32_t>(alphabet_size_);
    std::size_t i = 0;
    while (i < lengths_.size()) {
        std::size_t j = i;
        while (j < lengths_.size() && lengths_[j] == lengths_[i]) ++j;
        out.put<std::uint8_t>(lengths_[i]);
        out.put_varint(j - i);
        i = j;
    }
}

HuffmanTable HuffmanTable::deserialize(ByteReader& in) {
    const auto alphabet = in.get<std::uint32_t>();
    const std::size_t total = std::max<std::size_t>(alphabet, 2);
    std::vector<std::uint8_t> lengths;
    lengths.reserve(total);
    while (lengths.size() < total) {
        const auto len = in.get<std::uint8_t>();
        const auto run = in.get_varint();
        if (run == 0 || run > total - lengths.size()) throw CorruptStreamError("bad Huffman length run");
        lengths.insert(lengths.end(), static_cast<std::size_t>(run), len);
    }
    return from_lengths(std::move(lengths), alphabet);
}

namespace {

class BitWriter {
public:
    void write(std::uint64_t value, unsigned nbits) {
        // value is LSB-first: bit 0 goes out first.
        while (nbits > 0) {
            const unsigned take = std::min(nbits, 32u);
            acc_ |= (value & ((std::uint64_t{1} << take) - 1)) << fill_;
            fill_ += take;
            value >>= take;
            nbits -= take;
            total_ += take;
            while (fill_ >= 8) {
                bytes_.push_back(static_cast<std::uint8_t>(acc_));
                acc_ >>= 8;
                fill_ -= 8;
            }
        }
    }
    std::vector<std::uint8_t> finish(std::uint64_t& bit_count) && {
        if (fill_ > 0) bytes_.push_back(static_cast<std::uint8_t>(acc_));
        bit_count = total_;
        return std::move(bytes_);
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t acc_ = 0;
    unsigned fill_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace

HuffmanEncoded huffman_encode(std::span<const std::uint32_t> symbols, std::uint32_t alphabet_size) {
    std::vector<std::uint64_t> histogram(alphabet_size, 0);
    for (auto s : symbols) {
        if (s >= alphabet_size) {
            throw DomainError("symbol " + std::to_string(s) + " outside alphabet of size " +
                              std::to_string(alphabet_size));
        }
        ++histogram[s];
    }
    HuffmanEncoded out;
    out.table = HuffmanTable::from_histogram(histogram);
    const auto& lengths = out.table.lengths();
    std::vector<std::uint64_t> reversed(lengths.size());
    for (std::size_t s = 0; s < lengths.size(); ++s) {
        reversed[s] = reverse_bits(out.table.codes()[s], lengths[s]);
    }
    BitWriter writer;
    for (auto s : symbols) writer.write(reversed[s], lengths[s]);
    out.bits = std::move(writer).finish(out.bit_count);
    return out;
}

/// Table-driven canonical decoder: a kLookupBits-wide table resolves short
/// codes; longer ones fall back to the first-code-per-length walk.
class HuffmanDecoder {
public:
    explicit HuffmanDecoder(const HuffmanTable& table) {
        const auto& lengths = table.lengths_;
        for (std::uint32_t s = 0; s < lengths.size(); ++s) {
            if (lengths[s]) {
                sorted_.push_back(s);
                max_len_ = std::max<unsigned>(max_len_, lengths[s]);
            }
        }
        std::stable_sort(sorted_.begin(), sorted_.end(),
                         [&](auto a, auto b) { return lengths[a] < lengths[b]; });
        count_.assign(max_len_ + 1, 0);
        for (auto s : sorted_) ++count_[lengths[s]];
        first_code_.assign(max_len_ + 2, 0);
        first_index_.assign(max_len_ + 2, 0);
        std::uint64_t code = 0;
        std::size_t index = 0;
        for (unsigned len = 1; len <= max_len_; ++len) {
            code = (code + (len > 1 ? count_[len - 1] : 0)) << (len > 1 ? 1 : 0);
            first_code_[len] = code;
            first_index_[len] = index;
            index += count_[len];
        }
        lookup_.assign(std::size_t{1} << kLookupBits, Entry{});
        for (auto s : sorted_) {
            const unsigned len = lengths[s];
            if (len > kLookupBits) continue;
            const auto r = reverse_bits(table.codes_[s], len);
            for (std::uint64_t hi = 0; hi < (std::uint64_t{1} << (kLookupBits - len)); ++hi) {
                lookup_[r | (hi << len)] = Entry{s, static_cast<std::uint8_t>(len)};
            }
        }
    }

    std::vector<std::uint32_t> decode(std::span<const std::uint8_t> bits, std::uint64_t bit_count,
                                      std::size_t count) const {
        if (bits.size() * 8 < bit_count) throw CorruptStreamError("Huffman bitstream truncated");
        std::vector<std::uint32_t> out;
        out.reserve(count);
        std::uint64_t pos = 0;
        auto bit_at = [&](std::uint64_t p) -> unsigned { return bits[p >> 3] >> (p & 7) & 1u; };
        auto peek = [&](std::uint64_t p) {
            const std::size_t byte = static_cast<std::size_t>(p >> 3);
            std::uint64_t word = 0;
            if (byte < bits.size()) std::memcpy(&word, bits.data() + byte, std::min<std::size_t>(8, bits.size() - byte));
            word >>= (p & 7);
            const std::uint64_t avail = bit_count > p ? bit_count - p : 0;
            const unsigned width = static_cast<unsigned>(std::min<std::uint64_t>(kLookupBits, avail));
            return word & ((std::uint64_t{1} << width) - 1);
        };
        for (std::size_t n = 0; n < count; ++n) {
            if (sorted_.empty()) throw CorruptStreamError("Huffman stream has no codes");
            const Entry e = lookup_[peek(pos)];
            if (e.length && pos + e.length <= bit_count) {
                out.push_back(e.symbol);
                pos += e.length;
                continue;
            }
            std::uint64_t code = 0;
            unsigned len = 0;
            for (;;) {
                if (pos >= bit_count) throw CorruptStreamError("Huffman bitstream truncated");
                code = (code << 1) | bit_at(pos++);
                ++len;
                if (len > max_len_) throw CorruptStreamError("invalid Huffman code in stream");
                if (count_[len] && code >= first_code_[len] && code - first_code_[len] < count_[len]) {
                    out.push_back(sorted_[first_index_[len] + (code - first_code_[len])]);
                    break;
                }
            }
        }
        return out;
    }

private:
    struct Entry {
        std::uint32_t symbol = 0;
        std::uint8_t length = 0;
    };
    std::vector<std::uint32_t> sorted_;
    std::vector<std::uint64_t> count_;
    std::vector<std::uint64_t> first_code_;
    std::vector<std::size_t> first_index_;
    std::vector<Entry> lookup_;
    unsigned max_len_ = 0;
};

std::vector<std::uint32_t> huffman_decode(const HuffmanTable& table, std::span<const std::uint8_t> bits,
                                          std::uint64_t bit_count, std::size_t count) {
    if (count == 0) return {};
    return HuffmanDecoder(table).decode(bits, bit_count, count);
}

void write_huffman_section(ByteWriter& out, std::span<const std::uint32_t> symbols,
                           std::uint32_t alphabet_size) {
    if (symbols.size() > UINT32_MAX) throw DomainError("too many symbols for one Huffman section");
    const auto encoded = huffman_encode(symbols, alphabet_size);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(symbols.size()));
    encoded.table.serialize(out);
    out.put<std::uint64_t>(encoded.bit_count);
    out.put_bytes(encoded.bits);
}

std::vector<std::uint32_t> read_huffman_section(ByteReader& in, std::uint32_t alphabet_size) {
    const auto count = in.get<std::uint32_t>();
    const auto table = HuffmanTable::deserialize(in);
    if (table.alphabet_size() != alphabet_size) throw CorruptStreamError("Huffman alphabet mismatch");
    const auto bit_count = in.get<std::uint64_t>();
    if (bit_count > in.remaining() * 8ull) throw CorruptStreamError("Huffman bitstream truncated");
    const auto bits = in.get_bytes(static_cast<std::size_t>((bit_count + 7) / 8));
    return huffman_decode(table, bits, bit_count, count);
}

}  // namespace srnsz
