#include <doctest.h>

#include <cstring>

#include "fields.hpp"
#include "srnsz/engine.hpp"
#include "srnsz/metrics.hpp"
#include "srnsz/reference_bundles.hpp"
#include "srnsz/sparsifier.hpp"

using namespace srnsz;
using srnsz::testing::wavy;
using srnsz::testing::white_noise;

namespace {

const ErrorBoundSpec kRel3{ErrorBoundMode::value_range_relative, 1e-3, 0.0};

ModelRegistry bilinear_registry() {
    ModelRegistry reg;
    for (auto t : {NoiseTier::none, NoiseTier::weak, NoiseTier::strong}) reg.add(ModelBundle::load(bilinear_bundle(t)));
    return reg;
}

void check_round_trip(const DataGrid& grid, const ErrorBoundSpec& eb, const CodecConfig& cfg,
                      const ModelRegistry* reg = nullptr) {
    const auto res = compress(grid, eb, cfg, reg);
    const auto bytes = res.artifact.serialize();
    const auto back = decompress(bytes, reg);
    REQUIRE(back.shape() == grid.shape());
    CHECK(back.source_precision() == grid.source_precision());
    CHECK(std::memcmp(back.values().data(), res.reconstruction.values().data(), grid.size() * sizeof(double)) == 0);
    CHECK(max_abs_error(grid, back) <= res.artifact.header.error_bound.resolved_e);
}

}  // namespace

TEST_CASE("level plans") {
    auto plan = plan_levels(Shape{129, 129}, 32);
    REQUIRE(plan.steps.size() == 5);
    const std::size_t inputs[] = {5, 9, 17, 33, 65};
    for (int i = 0; i < 5; ++i) {
        CHECK(plan.steps[i].stride == std::size_t(32 >> i));
        CHECK(plan.steps[i].input_extents[0] == inputs[i]);
        CHECK(plan.steps[i].kind == (i == 4 ? PredictorKind::sr : PredictorKind::interp));
    }
    plan = plan_levels(Shape{33, 33}, 32);
    REQUIRE(plan.steps.size() == 5);
    CHECK(!plan.uses_sr());
    plan = plan_levels(Shape{64}, 32);
    CHECK(plan.steps.size() == 5);
    CHECK(!plan.uses_sr());
    plan = plan_levels(Shape{1 << 14}, 32, 8);
    CHECK(!plan.uses_sr());
    plan = plan_levels(Shape{129, 129, 129}, 32, 16);
    CHECK(plan.steps[2].kind == PredictorKind::sr);
    CHECK(plan.steps[1].kind == PredictorKind::interp);
    plan = plan_levels(Shape{40, 40}, 4, 4);
    CHECK(plan.steps[0].kind == PredictorKind::sr);
    CHECK(plan_levels(Shape{40, 40}, 4, 2).steps[1].kind == PredictorKind::sr);
    CHECK(plan_levels(Shape{12, 12}, 2, 2).steps[0].kind == PredictorKind::interp);  // 6 < 8
}

TEST_CASE("model tier selection") {
    CHECK(select_model_tier(5e-2) == NoiseTier::strong);
    CHECK(select_model_tier(1e-3) == NoiseTier::weak);
    CHECK(select_model_tier(1e-5) == NoiseTier::none);
    CHECK(select_model_tier(1e-2) == NoiseTier::weak);
    CHECK(select_model_tier(1e-4) == NoiseTier::weak);
    CHECK(select_model_tier(0.0) == NoiseTier::none);
}

TEST_CASE("round trip and bound, interpolation") {
    for (const Shape& s : {Shape{1000}, Shape{129, 129}, Shape{70, 33}, Shape{33, 40, 29}}) {
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            check_round_trip(wavy(s, 3, 0.01), {ErrorBoundMode::value_range_relative, eps, 0.0}, {});
        }
    }
    check_round_trip(white_noise(Shape{50, 50}, 4), {ErrorBoundMode::absolute, 0.5, 0.0}, {});
    check_round_trip(white_noise(Shape{20, 20, 20}, 5, Precision::f32), {ErrorBoundMode::absolute, 1e-3, 0.0}, {});
    CodecConfig small;
    small.radius = 2;
    check_round_trip(white_noise(Shape{40, 40}, 6), {ErrorBoundMode::absolute, 0.01, 0.0}, small);
    small.anchor_stride = 2;
    check_round_trip(wavy(Shape{17, 17}), kRel3, small);
}

TEST_CASE("round trip and bound, SR levels") {
    const auto reg = bilinear_registry();
    CodecConfig cfg;
    cfg.sr_min_dim = 8;
    for (const Shape& s : {Shape{129, 129}, Shape{65, 70}, Shape{33, 33, 40}}) {
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const auto grid = wavy(s, 7, 0.005);
            const ErrorBoundSpec eb{ErrorBoundMode::value_range_relative, eps, 0.0};
            const auto res = compress(grid, eb, cfg, &reg);
            CHECK(res.artifact.header.plan.uses_sr());
            REQUIRE(res.artifact.header.model_hash);
            CHECK(*res.artifact.header.model_hash ==
                  reg.find(kDefaultDomain, select_model_tier(eps))->content_hash());
            CHECK(!res.artifact.header.degraded);
            check_round_trip(grid, eb, cfg, &reg);
        }
    }
}

TEST_CASE("anchors survive exactly") {
    const auto grid = white_noise(Shape{67, 45}, 9);
    const auto res = compress(grid, {ErrorBoundMode::absolute, 5.0, 0.0});
    const auto back = decompress(res.artifact.serialize());
    const auto a = sparsify(grid, kDefaultAnchorStride);
    const auto b = sparsify(back, kDefaultAnchorStride);
    CHECK(a.values == b.values);
    CHECK(res.anchor_count == a.values.size());
}

TEST_CASE("code accounting") {
    for (std::size_t n : {1u, 2u, 9u, 33u, 100u}) {
        const auto res = compress(wavy(Shape{n, 7}), kRel3);
        if (res.artifact.header.constant_field) continue;
        CHECK(res.code_count == n * 7 - res.anchor_count);
    }
}

TEST_CASE("constant field short circuit") {
    const auto grid = DataGrid::constant(Shape{512, 512, 512}, -4.5, Precision::f32);
    const auto res = compress(grid, kRel3);
    const auto bytes = res.artifact.serialize();
    CHECK(bytes.size() < 256);
    CHECK(res.artifact.header.constant_field);
    const auto back = decompress(bytes);
    CHECK(back.shape() == grid.shape());
    CHECK((back.values() == -4.5).all());
    CHECK(compress(DataGrid::constant(Shape{3}, 1.0), {ErrorBoundMode::absolute, 0.0, 0.0}).artifact.header.constant_field);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(compress(wavy(Shape{20, 20}), {ErrorBoundMode::absolute, 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(compress(wavy(Shape{20, 20}), {ErrorBoundMode::value_range_relative, 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(compress(wavy(Shape{20, 20}), {ErrorBoundMode::absolute, -1.0, 0.0}), ConfigError);
    CodecConfig bad;
    bad.anchor_stride = 24;
    CHECK_THROWS_AS(compress(wavy(Shape{20, 20}), kRel3, bad), ConfigError);
    bad = {};
    bad.radius = 0;
    CHECK_THROWS_AS(compress(wavy(Shape{20, 20}), kRel3, bad), ConfigError);
    const DataGrid not_f32(Shape{3}, std::vector<double>{0.1, 0.2, 0.3}, Precision::f32);
    CHECK_THROWS_AS(compress(not_f32, kRel3), IngestionError);
}

TEST_CASE("model policy") {
    const auto grid = wavy(Shape{129, 129});
    CodecConfig strict;
    strict.model_policy = ModelPolicy::strict;
    try {
        compress(grid, kRel3, strict);
        FAIL("expected ModelNotFoundError");
    } catch (const ModelNotFoundError& e) {
        CHECK(std::string(e.what()) == "model tier 'weak' not found");
    }
    ModelRegistry strong_only;
    strong_only.add(ModelBundle::load(bilinear_bundle(NoiseTier::strong)));
    CHECK_THROWS_AS(compress(grid, kRel3, strict, &strong_only), ModelNotFoundError);

    const auto degraded = compress(grid, kRel3, {}, &strong_only);
    CHECK(degraded.artifact.header.degraded);
    CHECK(!degraded.artifact.header.plan.uses_sr());
    const auto plain = compress(grid, kRel3);
    CHECK(plain.artifact.header.degraded);
    CHECK(plain.artifact.serialize() == degraded.artifact.serialize());
    CHECK(!compress(wavy(Shape{20, 20}), kRel3).artifact.header.degraded);

    ModelRegistry ocean;
    ocean.add(ModelBundle::load(nearest_bundle(NoiseTier::weak)), "ocean");
    ocean.add(ModelBundle::load(bilinear_bundle(NoiseTier::weak)));
    CodecConfig dom;
    dom.domain = "ocean";
    const auto a = compress(grid, kRel3, dom, &ocean);
    CHECK(*a.artifact.header.model_hash == ocean.find("ocean", NoiseTier::weak)->content_hash());
    dom.domain = "climate";
    const auto b = compress(grid, kRel3, dom, &ocean);
    CHECK(*b.artifact.header.model_hash == ocean.find(kDefaultDomain, NoiseTier::weak)->content_hash());
}

TEST_CASE("decompression failures") {
    const auto reg = bilinear_registry();
    CodecConfig cfg;
    cfg.sr_min_dim = 16;
    const auto res = compress(wavy(Shape{65, 65}), kRel3, cfg, &reg);
    const auto bytes = res.artifact.serialize();

    try {
        decompress(bytes);
        FAIL("expected ModelNotFoundError");
    } catch (const ModelNotFoundError& e) {
        CHECK(std::string(e.what()).find(to_hex(*res.artifact.header.model_hash)) != std::string::npos);
    }
    const std::size_t payload_start = bytes.size() - res.artifact.payload.size();
    for (std::size_t off = payload_start; off < bytes.size(); off += 7) {
        auto bad = bytes;
        bad[off] ^= 0x10;
        CHECK_THROWS_AS(decompress(bad, &reg), CorruptStreamError);
    }
    for (std::size_t cut = 0; cut < bytes.size(); cut += 13) {
        CHECK_THROWS_AS(decompress(std::span(bytes).first(cut), &reg), CorruptStreamError);
    }
    auto longer = bytes;
    longer.push_back(0);
    CHECK_THROWS_AS(decompress(longer, &reg), CorruptStreamError);
    auto magic = bytes;
    magic[0] = 'X';
    CHECK_THROWS_AS(decompress(magic, &reg), CorruptStreamError);
    auto version = bytes;
    version[4] = 9;
    CHECK_THROWS_AS(decompress(version, &reg), CorruptStreamError);
}

TEST_CASE("artifact header round trip") {
    const auto res = compress(wavy(Shape{40, 50, 30}), kRel3);
    const auto parsed = CompressedArtifact::parse(res.artifact.serialize());
    const auto& a = res.artifact.header;
    const auto& b = parsed.header;
    CHECK(a.shape == b.shape);
    CHECK(a.dtype == b.dtype);
    CHECK(a.error_bound.resolved_e == b.error_bound.resolved_e);
    CHECK(a.error_bound.epsilon == b.error_bound.epsilon);
    CHECK(a.plan.steps == b.plan.steps);
    CHECK(a.normalization.minimum == b.normalization.minimum);
    CHECK(a.payload_digest == b.payload_digest);
    CHECK(parsed.payload == res.artifact.payload);
    CHECK(res.choices.size() == a.plan.steps.size());
}

TEST_CASE("determinism") {
    const auto grid = wavy(Shape{80, 90}, 5, 0.01);
    CHECK(compress(grid, kRel3).artifact.serialize() == compress(grid, kRel3).artifact.serialize());
}
