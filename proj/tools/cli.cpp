#include "cli.hpp"

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "srnsz/engine.hpp"
#include "srnsz/grid_io.hpp"
#include "srnsz/metrics.hpp"
#include "srnsz/reference_bundles.hpp"
#include "srnsz/synth.hpp"

namespace srnsz::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GridFlags {
    std::string dtype = "f32";
    std::vector<std::size_t> dims;
};

struct CodecFlags {
    std::string mode = "rel";
    std::vector<double> epsilons;
    std::string model_dir;
    std::size_t stride = kDefaultAnchorStride;
    std::size_t sr_min_dim = kDefaultSrMinDim;
    std::uint32_t radius = kDefaultQuantRadius;
    int zstd_level = kDefaultZstdLevel;
    bool strict = false;
    std::string domain = kDefaultDomain;

    [[nodiscard]] CodecConfig config() const {
        CodecConfig c;
        c.anchor_stride = stride;
        c.sr_min_dim = sr_min_dim;
        c.radius = radius;
        c.zstd_level = zstd_level;
        c.model_policy = strict ? ModelPolicy::strict : ModelPolicy::degrade;
        c.domain = domain;
        return c;
    }
};

ErrorBoundMode parse_mode(const std::string& s) {
    if (s == "rel") return ErrorBoundMode::value_range_relative;
    if (s == "abs") return ErrorBoundMode::absolute;
    return error_bound_mode_from_string(s);
}

/// -M, else $SRNSZ_MODEL_DIR, else no registry.
std::optional<ModelRegistry> open_registry(const std::string& flag) {
    std::string dir = flag;
    if (dir.empty()) {
        if (const char* env = std::getenv(kModelDirEnv)) dir = env;
    }
    if (dir.empty()) return std::nullopt;
    return ModelRegistry::open(dir);
}

const ModelRegistry* ptr(const std::optional<ModelRegistry>& r) { return r ? &*r : nullptr; }

std::string stem(const std::string& path) { return std::filesystem::path(path).filename().string(); }

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("-t,--dtype", g.dtype, "element type of the raw input")
        ->check(CLI::IsMember({"f32", "f64"}))
        ->capture_default_str();
    cmd->add_option("-d,--dims", g.dims, "extents, slowest axis first")->required()->expected(1, 3);
}

void add_codec_flags(CLI::App* cmd, CodecFlags& c) {
    cmd->add_option("-m,--mode", c.mode, "error-bound mode")
        ->check(CLI::IsMember({"abs", "rel"}))
        ->capture_default_str();
    cmd->add_option("-M,--models", c.model_dir, std::string("model registry directory (default $") + kModelDirEnv + ")");
    cmd->add_option("--stride", c.stride, "anchor stride")->capture_default_str();
    cmd->add_option("--sr-min-dim", c.sr_min_dim, "smallest level extent handled by the network")
        ->capture_default_str();
    cmd->add_option("--radius", c.radius, "quantization radius R")->capture_default_str();
    cmd->add_option("--zstd-level", c.zstd_level, "Zstandard level")->capture_default_str();
    cmd->add_flag("--strict", c.strict, "fail instead of degrading when the model tier is missing");
    cmd->add_option("--domain", c.domain, "model domain tag")->capture_default_str();
}

DataGrid read_input(const std::string& path, const GridFlags& g) {
    return read_raw(path, precision_from_string(g.dtype), Shape(g.dims));
}

std::ostream* open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return &fallback;
    file.open(path, std::ios::binary);
    if (!file) throw IngestionError("cannot open '" + path + "' for writing");
    return &file;
}

void print_summary(std::ostream& out, const std::string& name, const EvalRecord& r, const CompressionResult& res) {
    const auto& h = res.artifact.header;
    out << name << ": e=" << format_metric(r.resolved_e) << " CR=" << format_metric(r.compression_ratio)
        << " bit_rate=" << format_metric(r.bit_rate) << " psnr=" << format_metric(r.psnr)
        << " max_err=" << format_metric(r.max_abs_error) << " codes=" << res.code_count
        << " outliers=" << res.outlier_count;
    if (h.constant_field) out << " constant";
    if (h.degraded) out << " degraded";
    if (h.model_hash) out << " model=" << to_hex(*h.model_hash).substr(0, 12);
    out << '\n';
}

int cmd_compress(const std::string& input, const std::string& output, const GridFlags& g, const CodecFlags& c,
                 std::ostream& out) {
    const DataGrid grid = read_input(input, g);
    const auto registry = open_registry(c.model_dir);
    const auto t0 = Clock::now();
    const auto result = compress(grid, {parse_mode(c.mode), c.epsilons.front(), 0.0}, c.config(), ptr(registry));
    const auto bytes = result.artifact.serialize();
    const double elapsed = seconds_since(t0);
    write_file(output, bytes);
    EvalRecord r = evaluate(grid, result.reconstruction, bytes.size(), result.artifact.header.error_bound.resolved_e);
    r.seconds_compress = elapsed;
    print_summary(out, stem(input), r, result);
    return kOk;
}

int cmd_decompress(const std::string& input, const std::string& output, const std::string& model_dir,
                   std::ostream& out) {
    const auto bytes = read_file(input);
    const auto registry = open_registry(model_dir);
    const DataGrid grid = decompress(bytes, ptr(registry));
    write_raw(output, grid);
    out << stem(output) << ": " << to_string(grid.shape()) << ' ' << to_string(grid.source_precision()) << ", "
        << grid.size() * element_bytes(grid.source_precision()) << " bytes\n";
    return kOk;
}

int cmd_eval(const std::string& original, const std::string& artifact_path, const std::string& model_dir,
             const std::string& csv, const std::string& hist, std::size_t bins, std::ostream& out) {
    const auto bytes = read_file(artifact_path);
    const auto artifact = CompressedArtifact::parse(bytes);
    const auto& h = artifact.header;
    const DataGrid x = read_raw(original, h.dtype, h.shape);
    const auto registry = open_registry(model_dir);
    const auto t0 = Clock::now();
    const DataGrid x_prime = decompress(artifact, ptr(registry));
    const double elapsed = seconds_since(t0);
    EvalRecord r = evaluate(x, x_prime, bytes.size(), h.error_bound.resolved_e);
    r.name = stem(original);
    r.epsilon = h.error_bound.epsilon;
    r.seconds_decompress = elapsed;
    std::ofstream file;
    write_eval_csv(*open_output(csv, file, out), {r});
    if (!hist.empty()) {
        std::ofstream hfile(hist);
        if (!hfile) throw IngestionError("cannot open '" + hist + "' for writing");
        write_histogram_csv(hfile, error_histogram(x, x_prime, h.error_bound.resolved_e, bins));
    }
    return kOk;
}

int cmd_sweep(const std::vector<std::string>& inputs, const GridFlags& g, const CodecFlags& c, std::size_t jobs,
              const std::string& csv, std::ostream& out) {
    const auto registry = open_registry(c.model_dir);
    const auto mode = parse_mode(c.mode);
    const auto config = c.config();
    std::vector<DataGrid> grids;
    for (const auto& path : inputs) grids.push_back(read_input(path, g));

    struct Job {
        std::size_t file;
        double epsilon;
        EvalRecord record;
        std::exception_ptr error;
    };
    std::vector<Job> work;
    for (std::size_t f = 0; f < inputs.size(); ++f) {
        for (double eps : c.epsilons) work.push_back({f, eps, {}, nullptr});
    }
    auto run_job = [&](Job& job) {
        try {
            const DataGrid& grid = grids[job.file];
            auto t0 = Clock::now();
            const auto result = compress(grid, {mode, job.epsilon, 0.0}, config, ptr(registry));
            const auto bytes = result.artifact.serialize();
            const double tc = seconds_since(t0);
            t0 = Clock::now();
            const DataGrid back = decompress(bytes, ptr(registry));
            const double td = seconds_since(t0);
            job.record = evaluate(grid, back, bytes.size(), result.artifact.header.error_bound.resolved_e);
            job.record.name = stem(inputs[job.file]);
            job.record.epsilon = job.epsilon;
            job.record.seconds_compress = tc;
            job.record.seconds_decompress = td;
        } catch (...) {
            job.error = std::current_exception();
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) run_job(work[i]);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::max<std::size_t>(jobs, 1); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<EvalRecord> records;
    for (auto& job : work) {
        if (job.error) std::rethrow_exception(job.error);
        records.push_back(job.record);
    }
    std::ofstream file;
    write_eval_csv(*open_output(csv, file, out), records);
    return kOk;
}

int cmd_models_list(const std::string& model_dir, std::ostream& out) {
    const auto registry = open_registry(model_dir);
    if (!registry) throw ConfigError(std::string("no model registry: pass -M or set ") + kModelDirEnv);
    for (const auto& e : registry->entries()) {
        out << e.domain << '\t' << to_string(e.tier) << '\t' << to_hex(e.hash) << '\t' << e.path << '\n';
    }
    return kOk;
}

int cmd_models_add(const std::string& bundle, const std::string& model_dir, const std::string& domain,
                   std::ostream& out) {
    std::string dir = model_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv(kModelDirEnv)) dir = env;
    }
    if (dir.empty()) throw ConfigError(std::string("no model registry: pass -M or set ") + kModelDirEnv);
    std::filesystem::create_directories(dir);
    const auto entry = ModelRegistry::install(dir, read_file(bundle), domain);
    out << "added " << entry.domain << '/' << to_string(entry.tier) << ' ' << to_hex(entry.hash) << '\n';
    return kOk;
}

int cmd_synth(FieldSpec spec, const std::string& kind, const std::vector<std::size_t>& dims,
              const std::string& spec_file, const std::string& output, const std::string& spec_out,
              std::ostream& out) {
    if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        if (!in) throw IngestionError("cannot open '" + spec_file + "'");
        try {
            spec = field_spec_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad field spec '" + spec_file + "': " + e.what());
        }
    } else {
        spec.kind = field_kind_from_string(kind);
        spec.shape = Shape(dims);
    }
    const DataGrid grid = generate(spec);
    write_raw(output, grid);
    if (!spec_out.empty()) {
        std::ofstream js(spec_out);
        if (!js) throw IngestionError("cannot open '" + spec_out + "' for writing");
        js << to_json(spec).dump(2) << '\n';
    }
    out << stem(output) << ": " << to_string(spec.kind) << ' ' << to_string(spec.shape) << " seed " << spec.seed
        << " range " << format_metric(vrange(grid)) << '\n';
    return kOk;
}

int cmd_make_bundle(const std::string& kind, const std::string& tier_name, const MiniatureSpec& mini,
                    const std::string& output, std::ostream& out) {
    const NoiseTier tier = noise_tier_from_string(tier_name);
    std::vector<std::uint8_t> bytes;
    if (kind == "zero") bytes = zero_bundle(tier);
    else if (kind == "nearest") bytes = nearest_bundle(tier);
    else if (kind == "bilinear") bytes = bilinear_bundle(tier);
    else bytes = miniature_bundle(mini, tier);
    write_file(output, bytes);
    const auto bundle = ModelBundle::load(bytes);
    out << stem(output) << ": " << kind << ' ' << tier_name << ' ' << to_hex(bundle.content_hash()) << '\n';
    return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Error-bounded lossy compressor for floating-point grids", "srnsz"};
    app.require_subcommand(1);

    std::string input, output, artifact, csv, hist, model_dir, spec_file, spec_out, kind, tier = "none";
    std::vector<std::string> inputs;
    GridFlags grid;
    CodecFlags codec;
    std::size_t bins = 64, jobs = 1;

    auto* compress_cmd = app.add_subcommand("compress", "compress a raw grid");
    compress_cmd->add_option("-i,--input", input, "raw input file")->required();
    compress_cmd->add_option("-o,--output", output, "artifact path")->required();
    compress_cmd->add_option("-e,--epsilon", codec.epsilons, "error bound")->required()->expected(1);
    add_grid_flags(compress_cmd, grid);
    add_codec_flags(compress_cmd, codec);

    auto* decompress_cmd = app.add_subcommand("decompress", "decompress an artifact to a raw grid");
    decompress_cmd->add_option("-i,--input", input, "artifact")->required();
    decompress_cmd->add_option("-o,--output", output, "raw output file")->required();
    decompress_cmd->add_option("-M,--models", model_dir, "model registry directory");

    auto* eval_cmd = app.add_subcommand("eval", "metrics for an original and its artifact");
    eval_cmd->add_option("-i,--input", input, "original raw grid")->required();
    eval_cmd->add_option("-c,--compressed", artifact, "artifact")->required();
    eval_cmd->add_option("-M,--models", model_dir, "model registry directory");
    eval_cmd->add_option("-o,--output", csv, "CSV output (default stdout)");
    eval_cmd->add_option("--hist", hist, "write an error histogram CSV");
    eval_cmd->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber)->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "compress and decompress over a list of error bounds");
    sweep_cmd->add_option("-i,--input", inputs, "raw input files")->required();
    sweep_cmd->add_option("-e,--epsilon", codec.epsilons, "error bounds (default 1e-2 1e-3 1e-4 1e-5)");
    sweep_cmd->add_option("-o,--output", csv, "CSV output (default stdout)");
    sweep_cmd->add_option("-j,--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();
    add_grid_flags(sweep_cmd, grid);
    add_codec_flags(sweep_cmd, codec);

    auto* models_cmd = app.add_subcommand("models", "manage the model registry");
    models_cmd->require_subcommand(1);
    auto* list_cmd = models_cmd->add_subcommand("list", "list registered bundles");
    list_cmd->add_option("-M,--models", model_dir, "model registry directory");
    auto* add_cmd = models_cmd->add_subcommand("add", "install a bundle into the registry");
    add_cmd->add_option("bundle", input, "bundle file")->required();
    add_cmd->add_option("-M,--models", model_dir, "model registry directory");
    add_cmd->add_option("--domain", codec.domain, "domain tag")->capture_default_str();

    FieldSpec field;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic field as raw f32");
    synth_cmd->add_option("-k,--kind", kind, "field family")
        ->check(CLI::IsMember({"gaussian_mixture_bumps", "band_limited_fourier", "advected_vortex",
                               "piecewise_fronts"}));
    synth_cmd->add_option("-d,--dims", grid.dims, "extents")->expected(1, 3);
    synth_cmd->add_option("--seed", field.seed)->capture_default_str();
    synth_cmd->add_option("--components", field.components)->capture_default_str();
    synth_cmd->add_option("--max-frequency", field.max_frequency)->capture_default_str();
    synth_cmd->add_option("--smoothness", field.smoothness)->capture_default_str();
    synth_cmd->add_option("--sharpness", field.sharpness)->capture_default_str();
    synth_cmd->add_option("--spec", spec_file, "read the field spec from JSON instead");
    synth_cmd->add_option("--spec-out", spec_out, "write the field spec as JSON");
    synth_cmd->add_option("-o,--output", output, "raw output file")->required();

    MiniatureSpec mini;
    auto* bundle_cmd = app.add_subcommand("make-bundle", "write a reference SR model bundle");
    bundle_cmd->add_option("-k,--kind", kind, "network")
        ->required()
        ->check(CLI::IsMember({"zero", "nearest", "bilinear", "miniature"}));
    bundle_cmd->add_option("--tier", tier, "noise tier tag")
        ->check(CLI::IsMember({"none", "weak", "strong"}))
        ->capture_default_str();
    bundle_cmd->add_option("--channels", mini.channels)->capture_default_str();
    bundle_cmd->add_option("--blocks", mini.residual_blocks)->capture_default_str();
    bundle_cmd->add_option("--seed", mini.seed)->capture_default_str();
    bundle_cmd->add_option("-o,--output", output, "bundle path")->required();

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    }

    if (*compress_cmd) return cmd_compress(input, output, grid, codec, out);
    if (*decompress_cmd) return cmd_decompress(input, output, model_dir, out);
    if (*eval_cmd) return cmd_eval(input, artifact, model_dir, csv, hist, bins, out);
    if (*sweep_cmd) {
        if (codec.epsilons.empty()) codec.epsilons = {1e-2, 1e-3, 1e-4, 1e-5};
        return cmd_sweep(inputs, grid, codec, jobs, csv, out);
    }
    if (*list_cmd) return cmd_models_list(model_dir, out);
    if (*add_cmd) return cmd_models_add(input, model_dir, codec.domain, out);
    if (*synth_cmd) {
        if (spec_file.empty() && (kind.empty() || grid.dims.empty())) {
            err << "error: synth needs --kind and --dims, or --spec\n";
            return kUserError;
        }
        return cmd_synth(field, kind, grid.dims, spec_file, output, spec_out, out);
    }
    if (*bundle_cmd) return cmd_make_bundle(kind, tier, mini, output, out);
    return kInternal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const CorruptStreamError& e) {
        err << "error: corrupt artifact: " << e.what() << '\n';
        return kCorruption;
    } catch (const CorruptModelError& e) {
        err << "error: corrupt model bundle: " << e.what() << '\n';
        return kCorruption;
    } catch (const ContractError& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace srnsz::cli
