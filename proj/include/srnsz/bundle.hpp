#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "srnsz/digest.hpp"
#include "srnsz/tensor.hpp"

namespace srnsz {

/// Training-noise intensity a bundle was produced with (stored as one byte).
enum class NoiseTier : std::uint8_t { none = 0, weak = 1, strong = 2 };

std::string to_string(NoiseTier tier);
NoiseTier noise_tier_from_string(const std::string& s);

inline constexpr std::uint16_t kBundleFormatVersion = 1;

struct NamedTensor {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<float> values;
};

class Network;

/// A validated super-resolution model.
///
/// File layout (little-endian): "SRNB", u16 format version, u8 noise tier,
/// u32 graph length, graph (UTF-8 JSON: {"layers": [...], "tensors":
/// [{"name", "shape"}...]}), tensor payloads as f32 in declaration order,
/// then SHA-256 over every preceding byte.
///
/// Layers run in the listed order. Each has a unique "name" and reads the
/// previous layer's output unless "input" names another layer ("input" is
/// the network input); "add" takes "inputs": [a, b]. Supported types:
/// conv2d {in_channels, out_channels, kernel, stride, padding, weight, bias},
/// activation {fn: relu|gelu|leaky_relu, slope}, add, channel_attention
/// {channels, reduction, fc1_weight, fc1_bias, fc2_weight, fc2_bias} and a
/// single terminal pixel_shuffle {factor: 2}.
class ModelBundle {
public:
    /// Parses and validates; see the class comment for the error mapping.
    static ModelBundle load(std::span<const std::uint8_t> bytes);

    [[nodiscard]] NoiseTier noise_tier() const noexcept { return tier_; }
    [[nodiscard]] const Digest256& content_hash() const noexcept { return hash_; }
    [[nodiscard]] const nlohmann::json& graph() const noexcept { return graph_; }
    [[nodiscard]] const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }
    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
    [[nodiscard]] const Network& network() const noexcept { return *network_; }

    /// Receptive-field radius in input pixels (sum of conv kernel radii).
    [[nodiscard]] int receptive_radius() const noexcept;

private:
    NoiseTier tier_ = NoiseTier::none;
    Digest256 hash_{};
    nlohmann::json graph_;
    std::vector<NamedTensor> tensors_;
    std::vector<std::uint8_t> bytes_;
    std::shared_ptr<const Network> network_;
};

/// Serializes graph + tensors into the bundle format (hash appended).
std::vector<std::uint8_t> encode_bundle(const nlohmann::json& graph, std::span<const NamedTensor> tensors,
                                        NoiseTier tier);

/// Incrementally assembles a graph; layer names are generated.
class BundleBuilder {
public:
    /// Returns the new layer's name. `input` empty means "previous layer".
    std::string conv2d(int in_channels, int out_channels, int kernel, std::vector<float> weight,
                       std::vector<float> bias, const std::string& input = {});
    std::string activation(const std::string& fn, const std::string& input = {}, double slope = 0.01);
    std::string add(const std::string& a, const std::string& b);
    std::string channel_attention(int channels, int reduction, std::vector<float> fc1_weight,
                                  std::vector<float> fc1_bias, std::vector<float> fc2_weight,
                                  std::vector<float> fc2_bias, const std::string& input = {});
    std::string pixel_shuffle(const std::string& input = {});

    /// Escape hatch for tests that need malformed graphs.
    nlohmann::json& raw_graph() noexcept { return graph_; }
    std::vector<NamedTensor>& raw_tensors() noexcept { return tensors_; }

    [[nodiscard]] std::vector<std::uint8_t> encode(NoiseTier tier) const;

private:
    std::string add_tensor(const std::string& layer, const std::string& suffix, std::vector<std::int64_t> shape,
                           std::vector<float> values);
    std::string next_name(const std::string& type);

    nlohmann::json graph_ = {{"layers", nlohmann::json::array()}, {"tensors", nlohmann::json::array()}};
    std::vector<NamedTensor> tensors_;
    int counter_ = 0;
};

/// Executable form of a bundle's graph (float inference).
class Network {
public:
    struct Layer;

    explicit Network(std::vector<Layer> layers);
    ~Network();
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Input: 1 x H x W, output: 1 x 2H x 2W. Deterministic.
    [[nodiscard]] Tensor<float> forward(const Tensor<float>& input) const;

    [[nodiscard]] int receptive_radius() const noexcept { return radius_; }

private:
    std::vector<Layer> layers_;
    int radius_ = 0;
};

}  // namespace srnsz
