#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "srnsz/metrics.hpp"

using namespace srnsz;

namespace {

DataGrid line(std::vector<double> v) {
    const std::size_t n = v.size();
    return DataGrid(Shape{n}, v);
}

}  // namespace

TEST_CASE("compression ratio and bit rate") {
    CHECK(compression_ratio(400, 100) == 4.0);
    CHECK(compression_ratio(100, 100) == 1.0);
    CHECK(compression_ratio(4'000'000, 125'000) == 32.0);
    CHECK_THROWS_AS(compression_ratio(10, 0), DomainError);
    CHECK(bit_rate(1'000'000, 125'000) == 1.0);
    CHECK(bit_rate(1000, 4000) == 32.0);   // CR 1 for f32
    CHECK(bit_rate(1000, 4000) == 32.0);   // CR 2 for f64: 8000 bytes -> 4000
    CHECK_THROWS_AS(bit_rate(0, 10), DomainError);
}

TEST_CASE("psnr") {
    const auto x = line({0.0, 1.0});
    CHECK(psnr(x, x) == std::numeric_limits<double>::infinity());
    CHECK(mse(x, line({0.1, 0.9})) == doctest::Approx(0.01));
    CHECK(std::abs(psnr(x, line({0.1, 0.9})) - 20.0) <= 1e-9);
    CHECK(psnr(x, line({0.2, 0.8})) == doctest::Approx(20.0 - 20.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK(psnr(line({3, 3}), line({3, 3})) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(psnr(line({3, 3}), line({3, 4})), DomainError);
    CHECK_THROWS_AS(psnr(x, line({0, 1, 2})), DomainError);
}

TEST_CASE("psnr decreases with noise variance") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0, 1);
        std::uniform_real_distribution<double> u(0, 10);
        std::vector<double> base(1'000'000);
        for (auto& v : base) v = u(rng);
        const auto x = line(base);
        double prev = std::numeric_limits<double>::infinity();
        for (double sigma : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
            auto noisy = base;
            for (auto& v : noisy) v += sigma * n(rng);
            const double p = psnr(x, line(noisy));
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("doubled errors cost 20 log10 2") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> a(5000), b(5000), c(5000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        const double err = 0.01 * u(rng);
        b[i] = a[i] + err;
        c[i] = a[i] + 2 * err;
    }
    CHECK(psnr(line(a), line(b)) - psnr(line(a), line(c)) == doctest::Approx(20 * std::log10(2.0)).epsilon(1e-9));
}

TEST_CASE("error histogram") {
    const auto x = line({0, 1, 2, 3, 4});
    auto h = error_histogram(x, x, 0.1, 5);
    CHECK(h.violations == 0);
    CHECK(h.counts == std::vector<std::uint64_t>{0, 0, 5, 0, 0});
    CHECK(h.bin_center(2) == doctest::Approx(0.0));
    const auto y = line({0, 1 + 0.375, 2 - 0.25, 3 + 0.25, 4});
    h = error_histogram(x, y, 0.25, 4);
    CHECK(h.violations == 1);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[3] == 1);
    CHECK(h.counts[1] + h.counts[2] == 2);
    CHECK(error_histogram(x, x, 0.0, 3).counts[1] == 5);
}

TEST_CASE("eval record and csv") {
    std::vector<double> v(1000), w(1000);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = double(i % 64) / 64.0;
        w[i] = v[i] + (i % 2 ? 0.0009765625 : -0.0009765625);
    }
    const DataGrid x(Shape{1000}, v, Precision::f32), y(Shape{1000}, w, Precision::f32);
    const auto r = evaluate(x, y, 500, 2e-3);
    CHECK(r.original_bytes == 4000);
    CHECK(r.element_bits == 32);
    CHECK(r.bit_rate * r.compression_ratio == 32.0);
    CHECK(r.violations == 0);
    CHECK(r.max_abs_error == doctest::Approx(0.0009765625));

    auto same = evaluate(x, x, 100, 1e-3);
    same.name = "f";
    same.epsilon = 1e-3;
    std::ostringstream os;
    write_eval_csv(os, {same});
    const auto csv = os.str();
    CHECK(csv.rfind("name,epsilon,e,CR,bit_rate,psnr,max_err,violations,seconds_compress,seconds_decompress\n", 0) == 0);
    CHECK(csv.find(",inf,") != std::string::npos);
    CHECK(format_metric(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_metric(0.5) == "0.5");

    std::ostringstream hs;
    // Bins are half-open [lo, hi), so -e/2 falls in the second bin.
    write_histogram_csv(hs, error_histogram(x, y, 0.001953125, 4));
    CHECK(hs.str() == "bin_center,count\n-0.00146484375,0\n-0.00048828125,500\n0.00048828125,0\n0.00146484375,500\n");
}

TEST_CASE("bit rate times ratio is exact") {
    std::size_t inexact = 0;
    for (std::uint64_t n : {1000u, 4096u, 129u * 129u, 1'000'000u, 512u * 512u * 512u}) {
        for (unsigned bits : {32u, 64u}) {
            for (std::uint64_t c = 1; c < 5000; c += 37) {
                const double cr = compression_ratio(n * bits / 8, c);
                if (bit_rate(n, c) * cr != double(bits)) ++inexact;
            }
        }
    }
    CHECK(inexact == 0);
}
