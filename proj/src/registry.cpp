#include "srnsz/registry.hpp"

#include <fstream>

#include "srnsz/grid_io.hpp"

namespace srnsz {

using nlohmann::json;

NoiseTier select_model_tier(double relative_epsilon) noexcept {
    if (relative_epsilon > 1e-2) return NoiseTier::strong;
    if (relative_epsilon >= 1e-4) return NoiseTier::weak;
    return NoiseTier::none;
}

namespace {

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
    std::vector<ManifestEntry> entries;
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read model manifest '" + file.string() + "'");
    try {
        const json doc = json::parse(in);
        if (!doc.is_array()) throw ConfigError("model manifest must be a JSON array");
        for (const auto& e : doc) {
            entries.push_back({e.at("domain").get<std::string>(), noise_tier_from_string(e.at("tier").get<std::string>()),
                               digest_from_hex(e.at("hash").get<std::string>()), e.at("path").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ConfigError("malformed model manifest '" + file.string() + "': " + e.what());
    }
    return entries;
}

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries) {
    json doc = json::array();
    for (const auto& e : entries) {
        doc.push_back({{"domain", e.domain}, {"tier", to_string(e.tier)}, {"hash", to_hex(e.hash)}, {"path", e.path}});
    }
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write model manifest '" + file.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace

ModelRegistry ModelRegistry::open(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("model registry '" + dir.string() + "' is not a directory");
    }
    ModelRegistry registry;
    const auto manifest = dir / kManifestName;
    if (!std::filesystem::exists(manifest)) return registry;
    for (auto& entry : read_manifest(manifest)) {
        auto bundle = std::make_shared<const ModelBundle>(ModelBundle::load(read_file(dir / entry.path)));
        if (bundle->content_hash() != entry.hash) {
            throw CorruptModelError("bundle '" + entry.path + "' does not match its manifest hash");
        }
        if (bundle->noise_tier() != entry.tier) {
            throw InvalidModelError("bundle '" + entry.path + "' is tagged " + to_string(bundle->noise_tier()) +
                                    " but listed as " + to_string(entry.tier));
        }
        registry.entries_.push_back(std::move(entry));
        registry.bundles_.push_back(std::move(bundle));
    }
    return registry;
}

void ModelRegistry::add(ModelBundle bundle, const std::string& domain) {
    ManifestEntry entry{domain, bundle.noise_tier(), bundle.content_hash(), to_hex(bundle.content_hash()) + ".srnb"};
    entries_.push_back(std::move(entry));
    bundles_.push_back(std::make_shared<const ModelBundle>(std::move(bundle)));
}

const ModelBundle* ModelRegistry::find(const std::string& domain, NoiseTier tier) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].domain == domain && entries_[i].tier == tier) return bundles_[i].get();
    }
    if (domain != kDefaultDomain) return find(kDefaultDomain, tier);
    return nullptr;
}

const ModelBundle* ModelRegistry::find(const Digest256& hash) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].hash == hash) return bundles_[i].get();
    }
    return nullptr;
}

ManifestEntry ModelRegistry::install(const std::filesystem::path& dir, std::span<const std::uint8_t> bundle_bytes,
                                     const std::string& domain) {
    const auto bundle = ModelBundle::load(bundle_bytes);
    std::filesystem::create_directories(dir);
    const auto manifest = dir / kManifestName;
    std::vector<ManifestEntry> entries;
    if (std::filesystem::exists(manifest)) entries = read_manifest(manifest);
    ManifestEntry entry{domain, bundle.noise_tier(), bundle.content_hash(), to_hex(bundle.content_hash()) + ".srnb"};
    write_file(dir / entry.path, bundle_bytes);
    std::erase_if(entries, [&](const ManifestEntry& e) { return e.domain == domain && e.tier == entry.tier; });
    entries.push_back(entry);
    write_manifest(manifest, entries);
    return entry;
}

}  // namespace srnsz
