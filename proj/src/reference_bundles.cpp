#include "srnsz/reference_bundles.hpp"

#include <cmath>
#include <random>

namespace srnsz {

std::vector<std::uint8_t> zero_bundle(NoiseTier tier) {
    BundleBuilder b;
    b.conv2d(1, 4, 1, std::vector<float>(4, 0.0f), std::vector<float>(4, 0.0f));
    b.pixel_shuffle();
    return b.encode(tier);
}

std::vector<std::uint8_t> nearest_bundle(NoiseTier tier) {
    BundleBuilder b;
    b.conv2d(1, 4, 1, std::vector<float>(4, 1.0f), std::vector<float>(4, 0.0f));
    b.pixel_shuffle();
    return b.encode(tier);
}

std::vector<std::uint8_t> bilinear_bundle(NoiseTier tier) {
    // weight[co][0][ky][kx], 3x3 taps centred on the source pixel.
    std::vector<float> w(4 * 9, 0.0f);
    auto tap = [&](int co, int ky, int kx, float v) { w[static_cast<std::size_t>(co * 9 + ky * 3 + kx)] = v; };
    tap(0, 1, 1, 1.0f);
    tap(1, 1, 1, 0.5f);
    tap(1, 1, 2, 0.5f);
    tap(2, 1, 1, 0.5f);
    tap(2, 2, 1, 0.5f);
    for (auto [ky, kx] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) tap(3, ky, kx, 0.25f);
    BundleBuilder b;
    b.conv2d(1, 4, 3, std::move(w), std::vector<float>(4, 0.0f));
    b.pixel_shuffle();
    return b.encode(tier);
}

std::vector<std::uint8_t> miniature_bundle(const MiniatureSpec& spec, NoiseTier tier) {
    std::mt19937_64 rng(spec.seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto init = [&](std::size_t n, int fan_in) {
        const double bound = std::sqrt(1.0 / fan_in);
        std::vector<float> v(n);
        for (auto& x : v) x = static_cast<float>((2.0 * uniform() - 1.0) * bound);
        return v;
    };
    const int c = spec.channels;
    const auto cc = static_cast<std::size_t>(c);
    BundleBuilder b;
    const auto head = b.conv2d(1, c, 3, init(cc * 9, 9), std::vector<float>(cc, 0.0f));
    std::string x = head;
    for (int blk = 0; blk < spec.residual_blocks; ++blk) {
        b.conv2d(c, c, 3, init(cc * cc * 9, c * 9), std::vector<float>(cc, 0.0f), x);
        b.activation("gelu");
        std::string y = b.conv2d(c, c, 3, init(cc * cc * 9, c * 9), std::vector<float>(cc, 0.0f));
        if (spec.channel_attention) {
            const int hidden = c / spec.attention_reduction;
            const auto hh = static_cast<std::size_t>(hidden);
            y = b.channel_attention(c, spec.attention_reduction, init(hh * cc, c), std::vector<float>(hh, 0.0f),
                                    init(cc * hh, hidden), std::vector<float>(cc, 0.0f), y);
        }
        x = b.add(y, x);
    }
    b.conv2d(c, 4, 3, init(4 * cc * 9, c * 9), std::vector<float>(4, 0.0f), x);
    b.pixel_shuffle();
    return b.encode(tier);
}

}  // namespace srnsz
