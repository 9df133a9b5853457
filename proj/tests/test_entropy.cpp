#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "srnsz/byte_io.hpp"
#include "srnsz/huffman.hpp"
#include "srnsz/lossless.hpp"

using namespace srnsz;

namespace {

std::vector<std::uint32_t> round_trip(const std::vector<std::uint32_t>& symbols, std::uint32_t alphabet) {
    const auto enc = huffman_encode(symbols, alphabet);
    return huffman_decode(enc.table, enc.bits, enc.bit_count, symbols.size());
}

double empirical_entropy(const std::vector<std::uint32_t>& s) {
    std::map<std::uint32_t, double> counts;
    for (auto v : s) counts[v] += 1;
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = c / double(s.size());
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

TEST_CASE("huffman examples") {
    CHECK(round_trip({0, 0, 0, 1}, 2) == std::vector<std::uint32_t>{0, 0, 0, 1});
    const auto enc = huffman_encode(std::vector<std::uint32_t>{5, 5, 5}, 8);
    CHECK(enc.table.lengths()[5] == 1);
    CHECK(enc.bit_count == 3);
    CHECK(enc.table.kraft_sum() == 1.0);
    CHECK(round_trip({5, 5, 5}, 8) == std::vector<std::uint32_t>{5, 5, 5});
    CHECK(round_trip({0}, 1) == std::vector<std::uint32_t>{0});
    CHECK(round_trip({}, 4).empty());
    CHECK_THROWS_AS(huffman_encode(std::vector<std::uint32_t>{1, 4}, 4), DomainError);
}

TEST_CASE("geometric stream within entropy + 1") {
    std::mt19937_64 rng(21);
    std::geometric_distribution<std::uint32_t> geo(0.2);
    std::vector<std::uint32_t> s(1'000'000);
    for (auto& v : s) v = std::min<std::uint32_t>(geo(rng), 65535);
    const auto enc = huffman_encode(s, 65536);
    const double bits_per_symbol = double(enc.bit_count) / double(s.size());
    const double h = empirical_entropy(s);
    MESSAGE("entropy " << h << " bits/symbol " << bits_per_symbol);
    CHECK(bits_per_symbol >= h);
    CHECK(bits_per_symbol <= h + 1 + 0.05);
    CHECK(huffman_decode(enc.table, enc.bits, enc.bit_count, s.size()) == s);
    CHECK(enc.table.kraft_sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random and adversarial streams round trip") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint32_t alphabet = 1 + static_cast<std::uint32_t>(rng() % 5000);
        std::vector<std::uint32_t> s(rng() % 20000);
        for (auto& v : s) v = static_cast<std::uint32_t>(rng() % alphabet);
        CHECK(round_trip(s, alphabet) == s);
    }
    // Fibonacci frequencies force the deepest possible tree for 40 symbols.
    std::vector<std::uint32_t> fib;
    std::uint64_t a = 1, b = 1;
    for (std::uint32_t sym = 0; sym < 30; ++sym) {
        for (std::uint64_t i = 0; i < a; ++i) fib.push_back(sym);
        const auto c = a + b;
        a = b;
        b = c;
    }
    const auto enc = huffman_encode(fib, 30);
    CHECK(*std::max_element(enc.table.lengths().begin(), enc.table.lengths().end()) == 29);
    CHECK(huffman_decode(enc.table, enc.bits, enc.bit_count, fib.size()) == fib);
}

TEST_CASE("canonical table determinism") {
    std::vector<std::uint32_t> s{3, 1, 1, 2, 2, 0, 0, 0, 7, 7, 7, 7};
    const auto t1 = huffman_encode(s, 8).table;
    std::reverse(s.begin(), s.end());
    const auto t2 = huffman_encode(s, 8).table;
    CHECK(t1 == t2);
    // Equal counts: shorter codes go to smaller symbols.
    const auto t3 = huffman_encode(std::vector<std::uint32_t>{0, 1, 2}, 3).table;
    CHECK(t3.lengths()[0] == 1);
    CHECK(t3.lengths()[1] == 2);
    CHECK(t3.lengths()[2] == 2);
    const auto rebuilt = HuffmanTable::from_lengths(t1.lengths(), t1.alphabet_size());
    CHECK(rebuilt == t1);
}

TEST_CASE("section serialization and corruption") {
    std::vector<std::uint32_t> s;
    for (std::uint32_t i = 0; i < 5000; ++i) s.push_back((i * 7919) % 300 + (i % 3 == 0 ? 0 : 32768));
    ByteWriter out;
    write_huffman_section(out, s, 65536);
    const auto bytes = out.bytes();
    {
        ByteReader in(bytes);
        CHECK(read_huffman_section(in, 65536) == s);
        CHECK(in.at_end());
    }
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
        const auto prefix = std::span<const std::uint8_t>(bytes).first(cut);
        ByteReader in(prefix);
        CHECK_THROWS_AS(read_huffman_section(in, 65536), CorruptStreamError);
    }
    {
        ByteReader in(bytes);
        CHECK_THROWS_AS(read_huffman_section(in, 1024), CorruptStreamError);
    }
    // Oversubscribed lengths.
    CHECK_THROWS_AS(HuffmanTable::from_lengths({1, 1, 1}, 3), CorruptStreamError);
    CHECK_THROWS_AS(HuffmanTable::from_lengths({64, 1}, 2), CorruptStreamError);
}

TEST_CASE("truncated bitstream") {
    std::vector<std::uint32_t> s(1000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 17;
    const auto enc = huffman_encode(s, 17);
    CHECK_THROWS_AS(huffman_decode(enc.table, enc.bits, enc.bit_count - 5, s.size()), CorruptStreamError);
}

TEST_CASE("zstd wrap") {
    CHECK(lossless_unwrap(lossless_wrap({})).empty());
    std::vector<std::uint8_t> zeros(1 << 20, 0);
    const auto frame = lossless_wrap(zeros);
    CHECK(frame.size() < 1024);
    CHECK(lossless_unwrap(frame) == zeros);

    std::mt19937_64 rng(1);
    std::vector<std::uint8_t> random(64 * 1024);
    for (auto& b : random) b = static_cast<std::uint8_t>(rng());
    for (int level : {1, 3, 19}) CHECK(lossless_unwrap(lossless_wrap(random, level)) == random);

    CHECK_THROWS_AS(lossless_unwrap(std::vector<std::uint8_t>{1, 2, 3, 4, 5}), CorruptStreamError);
    auto bad = lossless_wrap(random);
    bad[bad.size() / 2] ^= 0x5a;
    CHECK_THROWS_AS(lossless_unwrap(bad), CorruptStreamError);
    auto two = lossless_wrap(zeros);
    const auto f2 = lossless_wrap(zeros);
    two.insert(two.end(), f2.begin(), f2.end());
    CHECK_THROWS_AS(lossless_unwrap(two), CorruptStreamError);
    auto truncated = lossless_wrap(random);
    truncated.resize(truncated.size() - 4);
    CHECK_THROWS_AS(lossless_unwrap(truncated), CorruptStreamError);
}
