#include <doctest.h>

#include <nlohmann/json.hpp>

#include "srnsz/digest.hpp"
#include "srnsz/grid_io.hpp"
#include "srnsz/synth.hpp"

using namespace srnsz;

namespace {

std::string checksum(const DataGrid& g) { return to_hex(sha256(encode_raw(g))); }

}  // namespace

TEST_CASE("golden checksum") {
    FieldSpec spec;
    spec.kind = FieldKind::gaussian_mixture_bumps;
    spec.shape = Shape{129, 129};
    spec.seed = 1;
    const auto g = generate(spec);
    CHECK(g.source_precision() == Precision::f32);
    CHECK(checksum(g) == "db75573bcf2eab8f908948a4bfab51fa212cb4af5fd60fe3e7452bb324a1d513");
}

TEST_CASE("determinism and character") {
    for (auto kind : {FieldKind::gaussian_mixture_bumps, FieldKind::band_limited_fourier, FieldKind::advected_vortex,
                      FieldKind::piecewise_fronts}) {
        for (const Shape& s : {Shape{200}, Shape{64, 48}, Shape{20, 24, 28}}) {
            FieldSpec spec;
            spec.kind = kind;
            spec.shape = s;
            spec.seed = 42;
            const auto a = generate(spec);
            const auto b = generate(spec);
            CHECK((a.values() == b.values()).all());
            CHECK(vrange(a) > 0.0);
            CHECK(vrange(a) < 100.0);
            spec.seed = 43;
            CHECK(!(generate(spec).values() == a.values()).all());
        }
    }
}

TEST_CASE("zero frequency gives a constant field") {
    FieldSpec spec;
    spec.kind = FieldKind::band_limited_fourier;
    spec.shape = Shape{33, 33};
    spec.max_frequency = 0;
    CHECK(vrange(generate(spec)) == 0.0);
}

TEST_CASE("spec json round trip") {
    FieldSpec spec;
    spec.kind = FieldKind::advected_vortex;
    spec.shape = Shape{10, 20, 30};
    spec.seed = 99;
    spec.components = 5;
    spec.sharpness = 12.5;
    const auto back = field_spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
    CHECK(back.kind == spec.kind);
    CHECK(back.shape == spec.shape);
    CHECK(back.seed == 99);
    CHECK(back.components == 5);
    CHECK(back.sharpness == 12.5);
    CHECK(checksum(generate(back)) == checksum(generate(spec)));
    CHECK_THROWS_AS(field_spec_from_json(nlohmann::json{{"kind", "lava"}, {"shape", {4}}}), ConfigError);
    CHECK_THROWS_AS(field_spec_from_json(nlohmann::json{{"kind", "piecewise_fronts"}}), ConfigError);
}
