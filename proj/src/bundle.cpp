#include "srnsz/bundle.hpp"

#include <cstring>
#include <map>
#include <optional>
#include <unordered_map>
#include <variant>

#include "srnsz/byte_io.hpp"

namespace srnsz {

using nlohmann::json;

std::string to_string(NoiseTier tier) {
    switch (tier) {
        case NoiseTier::none: return "none";
        case NoiseTier::weak: return "weak";
        case NoiseTier::strong: return "strong";
    }
    return "unknown";
}

NoiseTier noise_tier_from_string(const std::string& s) {
    if (s == "none") return NoiseTier::none;
    if (s == "weak") return NoiseTier::weak;
    if (s == "strong") return NoiseTier::strong;
    throw ConfigError("unknown noise tier '" + s + "' (expected strong, weak or none)");
}

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FloatVector = Eigen::Matrix<float, Eigen::Dynamic, 1>;

struct Network::Layer {
    struct Conv {
        ConvWeights<float> weights;
    };
    struct Act {
        Activation fn;
        float slope;
    };
    struct Add {};
    struct Attention {
        ChannelAttentionWeights<float> weights;
    };
    struct Shuffle {
        int factor;
    };

    std::variant<Conv, Act, Add, Attention, Shuffle> op;
    std::vector<int> inputs;  // slot indices; slot 0 is the network input, slot i+1 is layer i
    int last_use = -1;        // filled by Network: last layer index reading this layer's output
};

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (int in : layers_[i].inputs) {
            if (in > 0) layers_[static_cast<std::size_t>(in - 1)].last_use = static_cast<int>(i);
        }
        if (const auto* conv = std::get_if<Layer::Conv>(&layers_[i].op)) {
            radius_ += static_cast<int>(conv->weights.padding());
        }
    }
}

Network::~Network() = default;

Tensor<float> Network::forward(const Tensor<float>& input) const {
    if (input.channels != 1) throw ContractError("network input must have one channel");
    std::vector<std::optional<Tensor<float>>> slots(layers_.size() + 1);
    slots[0] = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& layer = layers_[i];
        const auto& first = *slots[static_cast<std::size_t>(layer.inputs[0])];
        Tensor<float> result = std::visit(
            [&](const auto& op) -> Tensor<float> {
                using Op = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<Op, Layer::Conv>) {
                    return conv2d(first, op.weights);
                } else if constexpr (std::is_same_v<Op, Layer::Act>) {
                    Tensor<float> t = first;
                    apply_activation(t, op.fn, op.slope);
                    return t;
                } else if constexpr (std::is_same_v<Op, Layer::Add>) {
                    Tensor<float> t = first;
                    t.data += slots[static_cast<std::size_t>(layer.inputs[1])]->data;
                    return t;
                } else if constexpr (std::is_same_v<Op, Layer::Attention>) {
                    return channel_attention(first, op.weights);
                } else {
                    return pixel_shuffle(first, op.factor);
                }
            },
            layer.op);
        slots[i + 1] = std::move(result);
        // Drop intermediate maps nobody reads anymore.
        for (int in : layer.inputs) {
            if (in > 0 && layers_[static_cast<std::size_t>(in - 1)].last_use == static_cast<int>(i)) {
                slots[static_cast<std::size_t>(in)].reset();
            }
        }
    }
    return std::move(*slots.back());
}

namespace {

constexpr char kMagic[4] = {'S', 'R', 'N', 'B'};

template <typename T>
T field(const json& layer, const char* key) {
    if (!layer.contains(key)) {
        throw InvalidModelError("layer '" + layer.value("name", std::string("?")) + "' lacks field '" + key + "'");
    }
    try {
        return layer.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidModelError(std::string("layer field '") + key + "' has the wrong type");
    }
}

class GraphCompiler {
public:
    explicit GraphCompiler(const std::vector<NamedTensor>& tensors) {
        for (const auto& t : tensors) by_name_[t.name] = &t;
    }

    std::vector<Network::Layer> compile(const json& graph) {
        if (!graph.contains("layers") || !graph["layers"].is_array()) {
            throw InvalidModelError("graph has no layer list");
        }
        const auto& layers = graph["layers"];
        if (layers.empty()) throw InvalidModelError("graph has no layers");
        slot_of_["input"] = 0;
        channels_.push_back(1);
        std::vector<Network::Layer> out;
        int shuffles = 0;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& spec = layers[i];
            if (!spec.is_object()) throw InvalidModelError("layer entry is not an object");
            const auto type = field<std::string>(spec, "type");
            const auto name = field<std::string>(spec, "name");
            if (slot_of_.count(name)) throw InvalidModelError("duplicate layer name '" + name + "'");
            Network::Layer layer;
            int out_channels = 0;
            if (type == "add") {
                const auto inputs = field<std::vector<std::string>>(spec, "inputs");
                if (inputs.size() != 2) throw InvalidModelError("add layer '" + name + "' needs two inputs");
                const int a = slot(inputs[0]);
                const int b = slot(inputs[1]);
                if (channels_[static_cast<std::size_t>(a)] != channels_[static_cast<std::size_t>(b)]) {
                    throw InvalidModelError("add layer '" + name + "' joins maps of different channel counts");
                }
                layer.inputs = {a, b};
                layer.op = Network::Layer::Add{};
                out_channels = channels_[static_cast<std::size_t>(a)];
            } else {
                const int in = spec.contains("input") ? slot(field<std::string>(spec, "input"))
                                                      : static_cast<int>(channels_.size()) - 1;
                const int in_channels = channels_[static_cast<std::size_t>(in)];
                layer.inputs = {in};
                if (type == "conv2d") {
                    const int cin = field<int>(spec, "in_channels");
                    const int cout = field<int>(spec, "out_channels");
                    const int k = field<int>(spec, "kernel");
                    const int stride = spec.value("stride", 1);
                    const int padding = spec.value("padding", k / 2);
                    if (cin != in_channels) {
                        throw InvalidModelError("conv2d '" + name + "' expects " + std::to_string(cin) +
                                                " input channels but receives " + std::to_string(in_channels));
                    }
                    if (cout < 1 || k < 1 || k % 2 == 0 || stride != 1 || padding != k / 2) {
                        throw InvalidModelError("conv2d '" + name +
                                                "' must be a stride-1 'same' convolution with an odd kernel");
                    }
                    Network::Layer::Conv conv;
                    conv.weights.kernel = k;
                    conv.weights.weight = matrix(field<std::string>(spec, "weight"), {cout, cin, k, k}, cout,
                                                 static_cast<Eigen::Index>(cin) * k * k);
                    conv.weights.bias = vector(field<std::string>(spec, "bias"), cout);
                    layer.op = std::move(conv);
                    out_channels = cout;
                } else if (type == "activation") {
                    const auto fn = field<std::string>(spec, "fn");
                    Network::Layer::Act act{Activation::relu, static_cast<float>(spec.value("slope", 0.01))};
                    if (fn == "relu") act.fn = Activation::relu;
                    else if (fn == "gelu") act.fn = Activation::gelu;
                    else if (fn == "leaky_relu") act.fn = Activation::leaky_relu;
                    else throw ModelVersionError("unsupported activation '" + fn + "'");
                    layer.op = act;
                    out_channels = in_channels;
                } else if (type == "channel_attention") {
                    const int c = field<int>(spec, "channels");
                    const int r = field<int>(spec, "reduction");
                    if (c != in_channels || r < 1 || c % r != 0) {
                        throw InvalidModelError("channel_attention '" + name + "' has inconsistent channels");
                    }
                    const int hidden = c / r;
                    Network::Layer::Attention att;
                    att.weights.fc1 = matrix(field<std::string>(spec, "fc1_weight"), {hidden, c}, hidden, c);
                    att.weights.b1 = vector(field<std::string>(spec, "fc1_bias"), hidden);
                    att.weights.fc2 = matrix(field<std::string>(spec, "fc2_weight"), {c, hidden}, c, hidden);
                    att.weights.b2 = vector(field<std::string>(spec, "fc2_bias"), c);
                    layer.op = std::move(att);
                    out_channels = c;
                } else if (type == "pixel_shuffle") {
                    const int factor = spec.value("factor", 2);
                    if (factor != 2) throw InvalidModelError("pixel_shuffle factor must be 2");
                    if (i + 1 != layers.size()) throw InvalidModelError("pixel_shuffle must be the final layer");
                    if (in_channels != 4) {
                        throw InvalidModelError("pixel_shuffle must receive 4 channels to emit one output channel");
                    }
                    layer.op = Network::Layer::Shuffle{factor};
                    out_channels = 1;
                    ++shuffles;
                } else {
                    throw ModelVersionError("unsupported layer type '" + type + "'");
                }
            }
            slot_of_[name] = static_cast<int>(channels_.size());
            channels_.push_back(out_channels);
            out.push_back(std::move(layer));
        }
        if (shuffles != 1) throw InvalidModelError("graph must end in exactly one pixel_shuffle(2)");
        return out;
    }

private:
    int slot(const std::string& name) const {
        const auto it = slot_of_.find(name);
        if (it == slot_of_.end()) throw InvalidModelError("layer input '" + name + "' is not defined earlier");
        return it->second;
    }

    const NamedTensor& tensor(const std::string& name, const std::vector<std::int64_t>& shape) const {
        const auto it = by_name_.find(name);
        if (it == by_name_.end()) throw InvalidModelError("missing tensor '" + name + "'");
        if (it->second->shape != shape) throw InvalidModelError("tensor '" + name + "' has the wrong shape");
        return *it->second;
    }

    FloatMatrix matrix(const std::string& name, const std::vector<std::int64_t>& shape, Eigen::Index rows,
                       Eigen::Index cols) const {
        const auto& t = tensor(name, shape);
        return Eigen::Map<const FloatMatrix>(t.values.data(), rows, cols);
    }

    FloatVector vector(const std::string& name, Eigen::Index n) const {
        const auto& t = tensor(name, {n});
        return Eigen::Map<const FloatVector>(t.values.data(), n);
    }

    std::unordered_map<std::string, const NamedTensor*> by_name_;
    std::unordered_map<std::string, int> slot_of_;
    std::vector<int> channels_;
};

}  // namespace

ModelBundle ModelBundle::load(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 + 2 + 1 + 4 + 32 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw CorruptModelError("not a model bundle (bad magic or truncated)");
    }
    const auto body = bytes.first(bytes.size() - 32);
    Digest256 stored{};
    std::memcpy(stored.data(), bytes.data() + body.size(), 32);
    if (sha256(body) != stored) throw CorruptModelError("model bundle content hash mismatch");

    ByteReader in(body);
    in.get_bytes(4);
    ModelBundle bundle;
    const auto version = in.get<std::uint16_t>();
    if (version != kBundleFormatVersion) {
        throw ModelVersionError("unsupported bundle format version " + std::to_string(version));
    }
    const auto tier = in.get<std::uint8_t>();
    if (tier > 2) throw ModelVersionError("unknown noise tier tag " + std::to_string(tier));
    bundle.tier_ = static_cast<NoiseTier>(tier);
    try {
        const auto graph_len = in.get<std::uint32_t>();
        bundle.graph_ = json::parse(in.get_string(graph_len));
        if (!bundle.graph_.contains("tensors") || !bundle.graph_["tensors"].is_array()) {
            throw InvalidModelError("graph has no tensor list");
        }
        for (const auto& decl : bundle.graph_["tensors"]) {
            NamedTensor t{decl.at("name").get<std::string>(), decl.at("shape").get<std::vector<std::int64_t>>(), {}};
            std::int64_t n = 1;
            for (auto d : t.shape) {
                if (d < 1 || d > (1 << 24)) throw InvalidModelError("tensor '" + t.name + "' has a bad extent");
                n *= d;
            }
            const auto raw = in.get_bytes(static_cast<std::size_t>(n) * 4);
            t.values.resize(static_cast<std::size_t>(n));
            std::memcpy(t.values.data(), raw.data(), raw.size());
            bundle.tensors_.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw InvalidModelError(std::string("malformed bundle graph: ") + e.what());
    } catch (const CorruptStreamError&) {
        throw InvalidModelError("bundle tensor payload shorter than declared");
    }
    if (!in.at_end()) throw InvalidModelError("bundle has trailing bytes after tensors");

    bundle.network_ = std::make_shared<const Network>(GraphCompiler(bundle.tensors_).compile(bundle.graph_));
    bundle.hash_ = stored;
    bundle.bytes_.assign(bytes.begin(), bytes.end());
    return bundle;
}

int ModelBundle::receptive_radius() const noexcept { return network_->receptive_radius(); }

std::vector<std::uint8_t> encode_bundle(const json& graph, std::span<const NamedTensor> tensors, NoiseTier tier) {
    ByteWriter out;
    out.put_bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
    out.put<std::uint16_t>(kBundleFormatVersion);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(tier));
    const std::string text = graph.dump();
    out.put<std::uint32_t>(static_cast<std::uint32_t>(text.size()));
    out.put_string(text);
    for (const auto& t : tensors) {
        out.put_bytes({reinterpret_cast<const std::uint8_t*>(t.values.data()), t.values.size() * 4});
    }
    const auto digest = sha256(out.bytes());
    out.put_bytes(digest);
    return std::move(out).take();
}

std::string BundleBuilder::next_name(const std::string& type) { return type + std::to_string(counter_++); }

std::string BundleBuilder::add_tensor(const std::string& layer, const std::string& suffix,
                                      std::vector<std::int64_t> shape, std::vector<float> values) {
    std::string name = layer + "." + suffix;
    graph_["tensors"].push_back({{"name", name}, {"shape", shape}});
    tensors_.push_back({name, std::move(shape), std::move(values)});
    return name;
}

namespace {
void link_input(json& layer, const std::string& input) {
    if (!input.empty()) layer["input"] = input;
}
}  // namespace

std::string BundleBuilder::conv2d(int in_channels, int out_channels, int kernel, std::vector<float> weight,
                                  std::vector<float> bias, const std::string& input) {
    const auto name = next_name("conv");
    json layer = {{"type", "conv2d"},      {"name", name},           {"in_channels", in_channels},
                  {"out_channels", out_channels}, {"kernel", kernel}, {"stride", 1},
                  {"padding", kernel / 2}};
    link_input(layer, input);
    layer["weight"] = add_tensor(name, "weight", {out_channels, in_channels, kernel, kernel}, std::move(weight));
    layer["bias"] = add_tensor(name, "bias", {out_channels}, std::move(bias));
    graph_["layers"].push_back(std::move(layer));
    return name;
}

std::string BundleBuilder::activation(const std::string& fn, const std::string& input, double slope) {
    const auto name = next_name("act");
    json layer = {{"type", "activation"}, {"name", name}, {"fn", fn}};
    if (fn == "leaky_relu") layer["slope"] = slope;
    link_input(layer, input);
    graph_["layers"].push_back(std::move(layer));
    return name;
}

std::string BundleBuilder::add(const std::string& a, const std::string& b) {
    const auto name = next_name("add");
    graph_["layers"].push_back({{"type", "add"}, {"name", name}, {"inputs", {a, b}}});
    return name;
}

std::string BundleBuilder::channel_attention(int channels, int reduction, std::vector<float> fc1_weight,
                                             std::vector<float> fc1_bias, std::vector<float> fc2_weight,
                                             std::vector<float> fc2_bias, const std::string& input) {
    const auto name = next_name("ca");
    const int hidden = channels / reduction;
    json layer = {{"type", "channel_attention"}, {"name", name}, {"channels", channels}, {"reduction", reduction}};
    link_input(layer, input);
    layer["fc1_weight"] = add_tensor(name, "fc1_weight", {hidden, channels}, std::move(fc1_weight));
    layer["fc1_bias"] = add_tensor(name, "fc1_bias", {hidden}, std::move(fc1_bias));
    layer["fc2_weight"] = add_tensor(name, "fc2_weight", {channels, hidden}, std::move(fc2_weight));
    layer["fc2_bias"] = add_tensor(name, "fc2_bias", {channels}, std::move(fc2_bias));
    graph_["layers"].push_back(std::move(layer));
    return name;
}

std::string BundleBuilder::pixel_shuffle(const std::string& input) {
    const auto name = next_name("shuffle");
    json layer = {{"type", "pixel_shuffle"}, {"name", name}, {"factor", 2}};
    link_input(layer, input);
    graph_["layers"].push_back(std::move(layer));
    return name;
}

std::vector<std::uint8_t> BundleBuilder::encode(NoiseTier tier) const { return encode_bundle(graph_, tensors_, tier); }

}  // namespace srnsz
