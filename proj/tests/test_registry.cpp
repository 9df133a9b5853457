#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "srnsz/grid_io.hpp"
#include "srnsz/reference_bundles.hpp"
#include "srnsz/registry.hpp"

using namespace srnsz;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("empty and missing registries") {
    TempDir dir("srnsz_reg_empty");
    const auto reg = ModelRegistry::open(dir.path);
    CHECK(reg.empty());
    CHECK(reg.find(kDefaultDomain, NoiseTier::weak) == nullptr);
    CHECK_THROWS_AS(ModelRegistry::open(dir.path / "nope"), ConfigError);
}

TEST_CASE("install, reopen and find") {
    TempDir dir("srnsz_reg_install");
    const auto weak = bilinear_bundle(NoiseTier::weak);
    const auto e1 = ModelRegistry::install(dir.path, weak);
    CHECK(e1.tier == NoiseTier::weak);
    CHECK(e1.domain == kDefaultDomain);
    CHECK(fs::exists(dir.path / (to_hex(e1.hash) + ".srnb")));
    ModelRegistry::install(dir.path, nearest_bundle(NoiseTier::strong), "ocean");
    ModelRegistry::install(dir.path, zero_bundle(NoiseTier::weak), "ocean");

    auto reg = ModelRegistry::open(dir.path);
    CHECK(reg.entries().size() == 3);
    CHECK(reg.find(kDefaultDomain, NoiseTier::weak)->content_hash() == e1.hash);
    CHECK(reg.find("ocean", NoiseTier::strong)->noise_tier() == NoiseTier::strong);
    CHECK(reg.find("ocean", NoiseTier::weak)->content_hash() != e1.hash);
    CHECK(reg.find("climate", NoiseTier::weak)->content_hash() == e1.hash);
    CHECK(reg.find("climate", NoiseTier::none) == nullptr);
    CHECK(reg.find(e1.hash) != nullptr);

    // Same (domain, tier) replaces the entry.
    const auto e2 = ModelRegistry::install(dir.path, miniature_bundle({8, 1, false, 4, 3}, NoiseTier::weak));
    reg = ModelRegistry::open(dir.path);
    CHECK(reg.entries().size() == 3);
    CHECK(reg.find(kDefaultDomain, NoiseTier::weak)->content_hash() == e2.hash);

    std::ifstream in(dir.path / "manifest.json");
    const auto doc = nlohmann::json::parse(in);
    REQUIRE(doc.is_array());
    for (const auto& e : doc) {
        CHECK(e.contains("domain"));
        CHECK(e.contains("tier"));
        CHECK(e.contains("hash"));
        CHECK(e.contains("path"));
    }
}

TEST_CASE("manifest inconsistencies") {
    TempDir dir("srnsz_reg_bad");
    const auto e = ModelRegistry::install(dir.path, bilinear_bundle(NoiseTier::weak));
    const auto file = dir.path / (to_hex(e.hash) + ".srnb");
    auto bytes = read_file(file);
    bytes[bytes.size() - 50] ^= 1;
    write_file(file, bytes);
    CHECK_THROWS_AS(ModelRegistry::open(dir.path), CorruptModelError);

    write_file(file, bilinear_bundle(NoiseTier::strong));
    CHECK_THROWS_AS(ModelRegistry::open(dir.path), CorruptModelError);

    std::ofstream(dir.path / "manifest.json") << "{not json";
    CHECK_THROWS_AS(ModelRegistry::open(dir.path), ConfigError);
}
