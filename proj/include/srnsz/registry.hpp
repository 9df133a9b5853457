#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "srnsz/bundle.hpp"

namespace srnsz {

inline constexpr const char* kDefaultDomain = "general";
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kRegistryEnvVar = "SRNSZ_MODEL_DIR";

/// Noise tier matched to a value-range-relative bound: strong above 1e-2,
/// weak on [1e-4, 1e-2], none below 1e-4.
NoiseTier select_model_tier(double relative_epsilon) noexcept;

struct ManifestEntry {
    std::string domain;
    NoiseTier tier = NoiseTier::none;
    Digest256 hash{};
    std::string path;  // relative to the registry directory
};

/// Model bundles indexed by content hash, plus a manifest mapping
/// (domain, tier) to a hash. On disk: a directory with manifest.json (a JSON
/// array of {domain, tier, hash, path}) next to the bundle files.
class ModelRegistry {
public:
    ModelRegistry() = default;

    /// Loads every bundle listed in `dir`/manifest.json and verifies that its
    /// content hash and tier tag match the manifest. A directory without a
    /// manifest is an empty registry.
    static ModelRegistry open(const std::filesystem::path& dir);

    /// Registers an already loaded bundle under `domain` (in memory only).
    void add(ModelBundle bundle, const std::string& domain = kDefaultDomain);

    /// Exact (domain, tier) match, falling back to the general domain.
    [[nodiscard]] const ModelBundle* find(const std::string& domain, NoiseTier tier) const;
    [[nodiscard]] const ModelBundle* find(const Digest256& hash) const;

    [[nodiscard]] const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    /// Copies a bundle into `dir` as <hash>.srnb and records it in the
    /// manifest, replacing any entry with the same (domain, tier).
    static ManifestEntry install(const std::filesystem::path& dir, std::span<const std::uint8_t> bundle_bytes,
                                 const std::string& domain = kDefaultDomain);

private:
    std::vector<ManifestEntry> entries_;
    std::vector<std::shared_ptr<const ModelBundle>> bundles_;  // parallel to entries_
};

}  // namespace srnsz
