#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "srnsz/grid_io.hpp"
#include "srnsz/synth.hpp"

using namespace srnsz;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "srnsz");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    return cells;
}

struct Workspace {
    fs::path dir = fs::temp_directory_path() / "srnsz_cli_test";
    std::string field, models;
    Workspace() {
        fs::remove_all(dir);
        fs::create_directories(dir);
        field = (dir / "field.f32").string();
        models = (dir / "models").string();
        unsetenv(cli::kModelDirEnv);
        FieldSpec spec;
        spec.shape = Shape{129, 129};
        write_raw(field, generate(spec));
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("compress, decompress and eval") {
    Workspace ws;
    auto r = run({"compress", "-i", ws.field, "-t", "f32", "-d", "129", "129", "-m", "rel", "-e", "1e-3", "-o",
                  ws.path("f.srnz")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("CR=") != std::string::npos);
    CHECK(r.out.find("degraded") != std::string::npos);

    r = run({"decompress", "-i", ws.path("f.srnz"), "-o", ws.path("back.f32")});
    REQUIRE(r.code == 0);
    CHECK(fs::file_size(ws.path("back.f32")) == fs::file_size(ws.field));

    r = run({"eval", "-i", ws.field, "-c", ws.path("f.srnz"), "--hist", ws.path("h.csv"), "--bins", "8"});
    REQUIRE(r.code == 0);
    const auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(split(lines[1]).at(7) == "0");
    const auto hist = csv_lines([&] {
        std::ifstream in(ws.path("h.csv"));
        return std::string(std::istreambuf_iterator<char>(in), {});
    }());
    CHECK(hist.size() == 9);
    CHECK(hist[0] == "bin_center,count");
}

TEST_CASE("error contracts") {
    Workspace ws;
    auto r = run({"compress", "-i", ws.field, "-d", "129", "129", "-e", "1e-3", "--strict", "-o", ws.path("x.srnz")});
    CHECK(r.code == 2);
    CHECK(r.err.find("model tier 'weak' not found") != std::string::npos);

    r = run({"compress", "-i", ws.field, "-d", "512", "512", "512", "-e", "1e-3", "-o", ws.path("x.srnz")});
    CHECK(r.code == 2);
    CHECK(r.err.find("size mismatch") != std::string::npos);

    r = run({"compress", "-i", ws.path("missing"), "-d", "4", "-e", "1e-3", "-o", ws.path("x.srnz")});
    CHECK(r.code == 2);
    r = run({"compress", "-i", ws.field, "-d", "129", "129", "-e", "1e-3", "--stride", "12", "-o", ws.path("x")});
    CHECK(r.code == 2);
    r = run({"compress", "--bogus"});
    CHECK(r.code == 2);
    r = run({});
    CHECK(r.code == 2);
    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("compress") != std::string::npos);

    REQUIRE(run({"compress", "-i", ws.field, "-d", "129", "129", "-e", "1e-3", "-o", ws.path("ok.srnz")}).code == 0);
    auto bytes = read_file(ws.path("ok.srnz"));
    bytes[bytes.size() - 10] ^= 0xff;
    write_file(ws.path("bad.srnz"), bytes);
    r = run({"decompress", "-i", ws.path("bad.srnz"), "-o", ws.path("out.f32")});
    CHECK(r.code == 3);
    CHECK(r.err.find("digest") != std::string::npos);
    CHECK(!fs::exists(ws.path("out.f32")));
}

TEST_CASE("model registry workflow") {
    Workspace ws;
    REQUIRE(run({"make-bundle", "-k", "bilinear", "--tier", "weak", "-o", ws.path("w.srnb")}).code == 0);
    auto r = run({"models", "add", ws.path("w.srnb"), "-M", ws.models});
    REQUIRE(r.code == 0);
    r = run({"models", "list", "-M", ws.models});
    CHECK(r.code == 0);
    CHECK(r.out.find("general\tweak\t") == 0);

    r = run({"compress", "-i", ws.field, "-d", "129", "129", "-e", "1e-3", "-M", ws.models, "--strict", "-o",
             ws.path("sr.srnz")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("model=") != std::string::npos);

    setenv(cli::kModelDirEnv, ws.models.c_str(), 1);
    CHECK(run({"decompress", "-i", ws.path("sr.srnz"), "-o", ws.path("sr.f32")}).code == 0);
    unsetenv(cli::kModelDirEnv);

    fs::create_directories(ws.path("empty"));
    r = run({"decompress", "-i", ws.path("sr.srnz"), "-M", ws.path("empty"), "-o", ws.path("sr2.f32")});
    CHECK(r.code == 2);
    const auto hash = r.err.substr(r.err.find("model ") + 6, 64);
    CHECK(run({"models", "list", "-M", ws.models}).out.find(hash) != std::string::npos);

    auto bundle = read_file(ws.path("w.srnb"));
    bundle[20] ^= 1;
    write_file(ws.path("bad.srnb"), bundle);
    CHECK(run({"models", "add", ws.path("bad.srnb"), "-M", ws.models}).code == 3);
}

TEST_CASE("sweep") {
    Workspace ws;
    auto r = run({"sweep", "-i", ws.field, "-d", "129", "129", "-e", "1e-2", "1e-3", "1e-4", "-j", "2"});
    REQUIRE(r.code == 0);
    const auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 4);
    double prev_cr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        CHECK(cells.at(7) == "0");
        const double cr = std::stod(cells.at(3));
        CHECK(cr <= prev_cr);
        prev_cr = cr;
    }
    r = run({"sweep", "-i", ws.field, "-i", ws.field, "-d", "129", "129", "-o", ws.path("s.csv")});
    REQUIRE(r.code == 0);
    std::ifstream in(ws.path("s.csv"));
    CHECK(csv_lines(std::string(std::istreambuf_iterator<char>(in), {})).size() == 9);
}

TEST_CASE("synth command") {
    Workspace ws;
    auto r = run({"synth", "-k", "piecewise_fronts", "-d", "16", "16", "16", "--seed", "3", "-o", ws.path("p.f32"),
                  "--spec-out", ws.path("p.json")});
    REQUIRE(r.code == 0);
    CHECK(fs::file_size(ws.path("p.f32")) == 16 * 16 * 16 * 4);
    r = run({"synth", "--spec", ws.path("p.json"), "-o", ws.path("q.f32")});
    REQUIRE(r.code == 0);
    CHECK(read_file(ws.path("p.f32")) == read_file(ws.path("q.f32")));
    CHECK(run({"synth", "-o", ws.path("z.f32")}).code == 2);
}
