#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "srnsz/bundle.hpp"
#include "srnsz/reference_bundles.hpp"
#include "srnsz/sr_inference.hpp"

using namespace srnsz;
using namespace srnsz::testing;

namespace {

using Index = Eigen::Index;

Plane random_plane(Index h, Index w, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3, 5);
    Plane p(h, w);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
    return p;
}

NormalizationParams norm_of(const Plane& p) { return {p.minCoeff(), p.maxCoeff() - p.minCoeff()}; }

std::vector<std::uint8_t> rehash(std::vector<std::uint8_t> bytes) {
    const auto body = std::span(bytes).first(bytes.size() - 32);
    const auto d = sha256(body);
    std::copy(d.begin(), d.end(), bytes.end() - 32);
    return bytes;
}

}  // namespace

TEST_CASE("conv2d matches the naive oracle") {
    std::mt19937_64 rng(1);
    for (const auto& [cin, cout, k, h, w] : std::vector<std::array<Index, 5>>{
             {1, 4, 3, 9, 11}, {3, 5, 1, 7, 6}, {4, 2, 5, 12, 8}, {8, 8, 3, 1, 13}, {2, 3, 7, 6, 6}}) {
        const auto in = random_tensor(cin, h, w, rng);
        ConvWeights<float> wt;
        wt.kernel = k;
        wt.weight = random_tensor(1, cout, cin * k * k, rng).data.reshaped<Eigen::RowMajor>(cout, cin * k * k);
        wt.bias = random_tensor(1, 1, cout, rng).data.transpose();
        CHECK(max_rel(conv2d(in, wt), naive_conv(in, wt)) <= 1e-5);
    }
}

TEST_CASE("pixel shuffle, activations and attention match direct oracles") {
    std::mt19937_64 rng(2);
    const auto in = random_tensor(8, 5, 7, rng);
    const auto out = pixel_shuffle(in, 2);
    CHECK(out.channels == 2);
    CHECK(out.height == 10);
    CHECK(out.width == 14);
    for (Index c = 0; c < 2; ++c)
        for (Index y = 0; y < 10; ++y)
            for (Index x = 0; x < 14; ++x) CHECK(out(c, y, x) == in(c * 4 + (y % 2) * 2 + x % 2, y / 2, x / 2));

    for (auto fn : {Activation::relu, Activation::gelu, Activation::leaky_relu}) {
        auto t = in;
        apply_activation(t, fn, 0.1f);
        for (Index i = 0; i < t.data.size(); ++i) {
            const double v = in.data.data()[i];
            double want = 0;
            if (fn == Activation::relu) want = std::max(v, 0.0);
            if (fn == Activation::leaky_relu) want = v >= 0 ? v : 0.1 * v;
            if (fn == Activation::gelu) want = 0.5 * v * (1 + std::erf(v / std::sqrt(2.0)));
            CHECK(std::abs(t.data.data()[i] - want) <= 1e-5 * std::max(1.0, std::abs(want)));
        }
    }

    ChannelAttentionWeights<float> aw;
    aw.fc1 = random_tensor(1, 2, 8, rng).data.reshaped<Eigen::RowMajor>(2, 8);
    aw.b1 = random_tensor(1, 1, 2, rng).data.transpose();
    aw.fc2 = random_tensor(1, 8, 2, rng).data.reshaped<Eigen::RowMajor>(8, 2);
    aw.b2 = random_tensor(1, 1, 8, rng).data.transpose();
    const auto att = channel_attention(in, aw);
    std::vector<double> pooled(8, 0.0), hidden(2, 0.0);
    for (Index c = 0; c < 8; ++c) {
        for (Index i = 0; i < 35; ++i) pooled[c] += in.data(c, i);
        pooled[c] /= 35;
    }
    for (Index j = 0; j < 2; ++j) {
        double s = aw.b1(j);
        for (Index c = 0; c < 8; ++c) s += aw.fc1(j, c) * pooled[c];
        hidden[j] = std::max(s, 0.0);
    }
    for (Index c = 0; c < 8; ++c) {
        double s = aw.b2(c);
        for (Index j = 0; j < 2; ++j) s += aw.fc2(c, j) * hidden[j];
        const double gate = 1 / (1 + std::exp(-s));
        for (Index i = 0; i < 35; ++i) {
            CHECK(std::abs(att.data(c, i) - gate * in.data(c, i)) <= 1e-5 * std::max(1.0, std::abs(double(in.data(c, i)))));
        }
    }
}

TEST_CASE("bundle loading") {
    const auto bytes = bilinear_bundle(NoiseTier::weak);
    const auto bundle = ModelBundle::load(bytes);
    CHECK(bundle.noise_tier() == NoiseTier::weak);
    CHECK(bundle.content_hash() == sha256(std::span(bytes).first(bytes.size() - 32)));

    SUBCASE("flipped tensor bit") {
        auto bad = bytes;
        bad[bad.size() - 40] ^= 0x04;
        CHECK_THROWS_AS(ModelBundle::load(bad), CorruptModelError);
    }
    SUBCASE("truncated or foreign bytes") {
        CHECK_THROWS_AS(ModelBundle::load(std::span(bytes).first(20)), CorruptModelError);
        std::vector<std::uint8_t> junk(100, 7);
        CHECK_THROWS_AS(ModelBundle::load(junk), CorruptModelError);
    }
    SUBCASE("three input channels") {
        BundleBuilder b;
        b.conv2d(3, 4, 1, std::vector<float>(12, 0.f), std::vector<float>(4, 0.f));
        b.pixel_shuffle();
        CHECK_THROWS_AS(ModelBundle::load(b.encode(NoiseTier::none)), InvalidModelError);
    }
    SUBCASE("unsupported layer and activation") {
        BundleBuilder b;
        b.conv2d(1, 4, 1, std::vector<float>(4, 0.f), std::vector<float>(4, 0.f));
        b.raw_graph()["layers"].push_back({{"name", "x"}, {"type", "window_attention"}});
        b.pixel_shuffle();
        CHECK_THROWS_AS(ModelBundle::load(b.encode(NoiseTier::none)), ModelVersionError);
        BundleBuilder c;
        c.conv2d(1, 4, 1, std::vector<float>(4, 0.f), std::vector<float>(4, 0.f));
        c.activation("swish");
        c.pixel_shuffle();
        CHECK_THROWS_AS(ModelBundle::load(c.encode(NoiseTier::none)), ModelVersionError);
    }
    SUBCASE("format version and tier tags") {
        auto v2 = bytes;
        v2[4] = 2;
        CHECK_THROWS_AS(ModelBundle::load(rehash(v2)), ModelVersionError);
        auto t9 = bytes;
        t9[6] = 9;
        CHECK_THROWS_AS(ModelBundle::load(rehash(t9)), ModelVersionError);
    }
    SUBCASE("graph structure") {
        BundleBuilder no_shuffle;
        no_shuffle.conv2d(1, 1, 3, std::vector<float>(9, 0.f), {0.f});
        CHECK_THROWS_AS(ModelBundle::load(no_shuffle.encode(NoiseTier::none)), InvalidModelError);
        BundleBuilder even;
        even.conv2d(1, 4, 2, std::vector<float>(16, 0.f), std::vector<float>(4, 0.f));
        even.pixel_shuffle();
        CHECK_THROWS_AS(ModelBundle::load(even.encode(NoiseTier::none)), InvalidModelError);
        BundleBuilder shape;
        shape.conv2d(1, 4, 3, std::vector<float>(9, 0.f), std::vector<float>(4, 0.f));
        shape.pixel_shuffle();
        CHECK_THROWS_AS(ModelBundle::load(shape.encode(NoiseTier::none)), InvalidModelError);
        BundleBuilder mid;
        mid.conv2d(1, 4, 1, std::vector<float>(4, 0.f), std::vector<float>(4, 0.f));
        mid.pixel_shuffle();
        mid.conv2d(1, 4, 1, std::vector<float>(4, 0.f), std::vector<float>(4, 0.f));
        CHECK_THROWS_AS(ModelBundle::load(mid.encode(NoiseTier::none)), InvalidModelError);
    }
}

TEST_CASE("reference networks") {
    std::mt19937_64 rng(3);
    const auto lr = random_plane(12, 9, rng);
    const auto norm = norm_of(lr);

    const auto zero = ModelBundle::load(zero_bundle());
    const auto z = sr_predict_2d(zero, lr, norm);
    CHECK(z.rows() == 24);
    CHECK(z.cols() == 18);
    CHECK((z.array() == norm.minimum).all());

    const auto nearest = ModelBundle::load(nearest_bundle());
    const auto n = sr_predict_2d(nearest, lr, norm);
    double worst = 0.0;
    for (Index y = 0; y < 24; ++y)
        for (Index x = 0; x < 18; ++x) worst = std::max(worst, std::abs(n(y, x) - lr(y / 2, x / 2)));
    CHECK(worst <= 1e-6 * norm.range);

    const auto constant = Plane::Constant(10, 10, 2.5);
    const auto nc = sr_predict_2d(nearest, constant, {2.5, 0.0});
    CHECK((nc.array() == 2.5).all());
}

TEST_CASE("shape contract, determinism and size limits") {
    std::mt19937_64 rng(4);
    const auto mini = ModelBundle::load(miniature_bundle({8, 2, true, 4, 7}));
    for (int trial = 0; trial < 12; ++trial) {
        const Index h = 8 + Index(rng() % 30), w = 8 + Index(rng() % 30);
        const auto lr = random_plane(h, w, rng);
        const auto out = sr_predict_2d(mini, lr, norm_of(lr));
        CHECK(out.rows() == 2 * h);
        CHECK(out.cols() == 2 * w);
        CHECK(out.allFinite());
        CHECK((sr_predict_2d(mini, lr, norm_of(lr)).array() == out.array()).all());
    }
    const auto full = ModelBundle::load(miniature_bundle({}));
    const auto lr16 = random_plane(16, 16, rng);
    const auto o16 = sr_predict_2d(full, lr16, norm_of(lr16));
    CHECK(o16.rows() == 32);
    CHECK(o16.cols() == 32);
    CHECK_THROWS_AS(sr_predict_2d(full, random_plane(7, 20, rng), {0, 1}), ContractError);
    CHECK_THROWS_AS(sr_predict_2d(full, random_plane(20, 4, rng), {0, 1}), ContractError);
}

TEST_CASE("tiled inference matches the direct bilinear oracle") {
    std::mt19937_64 rng(5);
    const auto bl = ModelBundle::load(bilinear_bundle());
    const auto lr = random_plane(600, 530, rng);
    const auto norm = norm_of(lr);
    const auto out = sr_predict_2d(bl, lr, norm);
    REQUIRE(out.rows() == 1200);
    REQUIRE(out.cols() == 1060);
    // In normalized space the network zero-pads past the edge.
    auto v = [&](Index y, Index x) {
        if (y >= lr.rows() || x >= lr.cols()) return 0.0;
        return (lr(y, x) - norm.minimum) / norm.range;
    };
    double worst = 0.0;
    for (Index y = 0; y < 1200; ++y) {
        for (Index x = 0; x < 1060; ++x) {
            const Index i = y / 2, j = x / 2;
            double want;
            if (y % 2 == 0 && x % 2 == 0) want = v(i, j);
            else if (y % 2 == 0) want = 0.5 * (v(i, j) + v(i, j + 1));
            else if (x % 2 == 0) want = 0.5 * (v(i, j) + v(i + 1, j));
            else want = 0.25 * (v(i, j) + v(i, j + 1) + v(i + 1, j) + v(i + 1, j + 1));
            worst = std::max(worst, std::abs(out(y, x) - (norm.minimum + norm.range * want)));
        }
    }
    CHECK(worst <= 1e-5 * norm.range);
}

TEST_CASE("3D refinement rules") {
    CHECK(classify_refinement_point({3, 2, 4}, 2) == PointRule::two_direction_mean);
    CHECK(classify_refinement_point({3, 5, 4}, 2) == PointRule::single_direction);
    CHECK(classify_refinement_point({3, 5, 7}, 2) == PointRule::center_spline);
    CHECK(classify_refinement_point({2, 4, 0}, 2) == PointRule::known);
    CHECK(classify_refinement_point({2, 4, 3}, 4) == PointRule::off_level);

    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t k = 0; k < 5; ++k) ++counts[static_cast<int>(classify_refinement_point({i, j, k}, 2))];
    CHECK(counts[0] == 0);
    CHECK(counts[1] == 27);
    CHECK(counts[2] == 54);
    CHECK(counts[3] == 36);
    CHECK(counts[4] == 8);
    CHECK(counts[1] + counts[2] + counts[3] + counts[4] == 125);
}

TEST_CASE("3D via slices") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    const Shape shape{17, 17, 17};
    std::vector<double> v(shape.count());
    for (auto& x : v) x = u(rng);
    const DataGrid recon(shape, v);
    const NormalizationParams norm{0.0, 1.0};
    const auto model = ModelBundle::load(bilinear_bundle());

    std::map<std::pair<int, std::size_t>, Plane> slices;
    const LatticeView<const double> view(recon.span(), shape.padded3());
    sr_predict_faces(model, view, 2, 3, norm, [&](const SlicePrediction& s) {
        CHECK(s.predicted.rows() == 18);
        CHECK(s.predicted.cols() == 18);
        slices[{static_cast<int>(s.orientation), s.slice_index}] = s.predicted;
    });
    CHECK(slices.size() == 27);

    const auto pred = sr_predict_3d_via_slices(model, recon, 2, norm);
    auto flat = [](std::size_t i, std::size_t j, std::size_t k) { return (i * 17 + j) * 17 + k; };
    // (3,2,4): odd on axis 0 only; the xy slice at z=4 and the xz slice at y=2 cover it.
    const double xy = slices[{0, 4}](3, 2), xz = slices[{1, 2}](3, 4);
    CHECK(pred.rules[flat(3, 2, 4)] == PointRule::two_direction_mean);
    CHECK(pred.values[flat(3, 2, 4)] == doctest::Approx((xy + xz) / 2).epsilon(1e-12));
    // (3,5,4): odd on axes 0 and 1; only the xy slice covers it.
    CHECK(pred.values[flat(3, 5, 4)] == doctest::Approx(slices[{0, 4}](3, 5)).epsilon(1e-12));
    CHECK(pred.rules[flat(3, 5, 7)] == PointRule::center_spline);
    CHECK(std::isfinite(pred.values[flat(3, 5, 7)]));
    CHECK(std::isnan(pred.values[flat(2, 4, 6)]));
    CHECK(pred.rules[flat(2, 4, 6)] == PointRule::known);
    for (std::size_t f = 0; f < v.size(); ++f) CHECK(pred.rules[f] != PointRule::off_level);

    const auto cst = DataGrid::constant(shape, 3.25);
    const auto nearest = ModelBundle::load(nearest_bundle());
    const auto cpred = sr_predict_3d_via_slices(nearest, cst, 2, {3.25, 0.0});
    for (std::size_t f = 0; f < v.size(); ++f) {
        if (pred.rules[f] != PointRule::known) CHECK(cpred.values[f] == 3.25);
    }
}
