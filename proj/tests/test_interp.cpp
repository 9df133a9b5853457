#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "srnsz/interp.hpp"
#include "srnsz/sparsifier.hpp"

using namespace srnsz;
using srnsz::testing::cubic_oracle;

namespace {

std::vector<Index3> all_shapes(std::size_t max_extent) {
    std::vector<Index3> shapes;
    for (std::size_t x = 1; x <= max_extent; ++x) {
        shapes.push_back({1, 1, x});
        for (std::size_t y = 1; y <= max_extent; ++y) {
            shapes.push_back({1, x, y});
            for (std::size_t z = 1; z <= max_extent; ++z) shapes.push_back({x, y, z});
        }
    }
    return shapes;
}

bool is_known(const Index3& p, std::size_t stride) {
    return p[0] % stride == 0 && p[1] % stride == 0 && p[2] % stride == 0;
}

}  // namespace

TEST_CASE("midpoint predictor examples") {
    CHECK(predict_cubic_midpoint(1, 3, 5, 7) == 4.0);
    CHECK(predict_cubic_midpoint(2.5, 2.5, 2.5, 2.5) == 2.5);
    CHECK(predict_cubic_midpoint(0, 1, 8, 27) == 3.375);
    CHECK(predict_linear_midpoint(0, 2) == 1.0);
    CHECK(predict_linear_midpoint(-7.25, -7.25) == -7.25);
    CHECK(predict_linear_midpoint(-1, 4) == 1.5);
}

TEST_CASE("polynomial reproduction") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-2, 2), pos(-5, 5), step(0.01, 2);
    for (int trial = 0; trial < 10000; ++trial) {
        const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
        const int degree = trial % 4;
        auto f = [&](double x) {
            double v = c0 + c1 * x;
            if (degree >= 2) v += c2 * x * x;
            if (degree >= 3) v += c3 * x * x * x;
            return v;
        };
        const double x = pos(rng), s = step(rng);
        const double truth = f(x);
        const double scale = std::max({std::abs(truth), std::abs(f(x - 3 * s)), std::abs(f(x + 3 * s)), 1.0});
        const double cubic = predict_cubic_midpoint(f(x - 3 * s), f(x - s), f(x + s), f(x + 3 * s));
        CHECK(std::abs(cubic - truth) <= 1e-12 * scale);
        if (degree <= 2) {
            CHECK(std::abs(predict_quadratic_left(f(x - 3 * s), f(x - s), f(x + s)) - truth) <= 1e-12 * scale);
            CHECK(std::abs(predict_quadratic_right(f(x - s), f(x + s), f(x + 3 * s)) - truth) <= 1e-12 * scale);
        }
        if (degree <= 1) CHECK(std::abs(predict_linear_midpoint(f(x - s), f(x + s)) - truth) <= 1e-12 * scale);
    }
}

TEST_CASE("cubic level exact on a cubic polynomial field interior") {
    const Index3 ext{1, 1, 65};
    auto f = [](double x) { return 0.001 * x * x * x - 0.2 * x * x + 3 * x - 1; };
    std::vector<double> truth(65), buf(65, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < 65; ++i) truth[i] = f(double(i));
    for (std::size_t i = 0; i < 65; i += 16) buf[i] = truth[i];
    for (std::size_t stride = 16; stride >= 2; stride /= 2) {
        interpolate_level(buf, ext, stride, InterpMethod::cubic_1d, [&](std::size_t flat, double pred) {
            const std::size_t h = stride / 2;
            if (flat >= 3 * h && flat + 3 * h < 65) CHECK(std::abs(pred - truth[flat]) <= 1e-12 * 300);
            return truth[flat];
        });
    }
}

TEST_CASE("edge fallbacks") {
    // Extent 6, stride 2: point 5 has no right neighbor and copies point 4.
    std::vector<double> buf{1, 0, 3, 0, 9, 0};
    std::vector<double> preds;
    interpolate_level(buf, Index3{1, 1, 6}, 2, InterpMethod::cubic_1d, [&](std::size_t, double pred) {
        preds.push_back(pred);
        return pred;
    });
    REQUIRE(preds.size() == 3);
    CHECK(preds[0] == doctest::Approx((3 * 1 + 6 * 3 - 9) / 8.0));  // quadratic right
    CHECK(preds[1] == doctest::Approx((-1 + 6 * 3 + 3 * 9) / 8.0));  // quadratic left
    CHECK(preds[2] == 9.0);                                          // copy
    std::vector<double> lin{2, 0, 6};
    interpolate_level(lin, Index3{1, 1, 3}, 2, InterpMethod::cubic_1d, [](std::size_t, double p) { return p; });
    CHECK(lin[1] == 4.0);
}

TEST_CASE("multidim spline") {
    const Index3 ext{7, 7, 7};
    std::vector<double> sep(343);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j)
            for (std::size_t k = 0; k < 7; ++k) sep[(i * 7 + j) * 7 + k] = double(i) + 2.0 * j - 0.5 * k;
    LatticeView<double> sv(sep, ext);
    CHECK(predict_multidim_spline(sv, {3, 3, 3}, 2) == doctest::Approx(sv.at({3, 3, 3})).epsilon(1e-14));

    std::vector<double> flat(343, 4.5);
    CHECK(predict_multidim_spline(LatticeView<double>(flat, ext), {3, 5, 1}, 2) == 4.5);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> r(343);
    for (auto& v : r) v = u(rng);
    LatticeView<double> rv(r, ext);
    auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return r[(i * 7 + j) * 7 + k]; };
    const double ox = cubic_oracle(at(0, 3, 3), at(2, 3, 3), at(4, 3, 3), at(6, 3, 3));
    const double oy = cubic_oracle(at(3, 0, 3), at(3, 2, 3), at(3, 4, 3), at(3, 6, 3));
    const double oz = cubic_oracle(at(3, 3, 0), at(3, 3, 2), at(3, 3, 4), at(3, 3, 6));
    CHECK(predict_multidim_spline(rv, {3, 3, 3}, 2) == doctest::Approx((ox + oy + oz) / 3).epsilon(1e-14));
}

TEST_CASE("interpolator selection") {
    SUBCASE("linear ramp ties go to cubic") {
        std::vector<double> ramp(129 * 129);
        for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.5 * double(i / 129) - 0.25 * double(i % 129);
        const auto choice = select_interpolator(ramp, {1, 129, 129}, 2);
        CHECK(choice.method == InterpMethod::cubic_1d);
        CHECK(choice.sse_linear == doctest::Approx(0.0));
        CHECK(choice.sse_cubic == doctest::Approx(0.0));
    }
    SUBCASE("piecewise linear data favors linear") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> v(65);
        for (std::size_t i = 0; i < 65; i += 2) v[i] = u(rng);
        for (std::size_t i = 1; i < 65; i += 2) v[i] = (v[i - 1] + v[i + 1]) / 2;
        double sse_cubic = 0.0;
        for (std::size_t i = 1; i < 65; i += 2) {
            double pred;
            if (i >= 3 && i + 3 < 65) pred = cubic_oracle(v[i - 3], v[i - 1], v[i + 1], v[i + 3]);
            else if (i >= 3) pred = (-v[i - 3] + 6 * v[i - 1] + 3 * v[i + 1]) / 8;
            else pred = (3 * v[i - 1] + 6 * v[i + 1] - v[i + 3]) / 8;
            sse_cubic += (pred - v[i]) * (pred - v[i]);
        }
        const auto choice = select_interpolator(v, {1, 1, 65}, 2);
        CHECK(choice.method == InterpMethod::linear);
        CHECK(choice.sse_linear == doctest::Approx(0.0));
        CHECK(choice.sse_cubic == doctest::Approx(sse_cubic).epsilon(1e-12));
    }
    SUBCASE("smooth 3D field picks the measured minimizer") {
        const Index3 ext{17, 17, 17};
        std::vector<double> v(17 * 17 * 17);
        for (std::size_t i = 0; i < 17; ++i)
            for (std::size_t j = 0; j < 17; ++j)
                for (std::size_t k = 0; k < 17; ++k)
                    v[(i * 17 + j) * 17 + k] = std::sin(0.3 * i) * std::cos(0.2 * j) + 0.01 * k * k * i;
        for (std::size_t stride : {8u, 4u, 2u}) {
            double sse[3] = {0, 0, 0};
            for (int m = 0; m < 3; ++m) {
                auto buf = v;
                interpolate_level(buf, ext, stride, static_cast<InterpMethod>(m), [&](std::size_t flat, double pred) {
                    sse[m] += (pred - v[flat]) * (pred - v[flat]);
                    return v[flat];
                });
            }
            const auto choice = select_interpolator(v, ext, stride);
            CHECK(choice.sse_linear == doctest::Approx(sse[0]));
            CHECK(choice.sse_cubic == doctest::Approx(sse[1]));
            CHECK(choice.sse_multidim == doctest::Approx(sse[2]));
            InterpMethod best = InterpMethod::cubic_1d;
            if (sse[0] < sse[1]) best = InterpMethod::linear;
            if (sse[2] < std::min(sse[0], sse[1])) best = InterpMethod::multidim_spline;
            CHECK(choice.method == best);
            CHECK(choice.method != InterpMethod::linear);
        }
    }
    SUBCASE("large levels are sampled") {
        std::vector<double> v(1025 * 1025);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.001 * double(i));
        const auto choice = select_interpolator(v, {1, 1025, 1025}, 2);
        CHECK(choice.sampled_points >= 1000);
        CHECK(choice.sampled_points < 1025 * 1025 * 3 / 4);
    }
}

TEST_CASE("every point is predicted once from known values, all shapes up to 9") {
    for (const auto& ext : all_shapes(9)) {
        const std::size_t n = ext[0] * ext[1] * ext[2];
        for (std::size_t anchor : {2u, 4u, 8u}) {
            for (int m = 0; m < 3; ++m) {
                std::vector<double> buf(n, std::numeric_limits<double>::quiet_NaN());
                std::vector<int> visits(n, 0);
                LatticeView<double> view(buf, ext);
                for (std::size_t i = 0; i < ext[0]; ++i)
                    for (std::size_t j = 0; j < ext[1]; ++j)
                        for (std::size_t k = 0; k < ext[2]; ++k)
                            if (is_known({i, j, k}, anchor)) view.at({i, j, k}) = double(i + j + k);
                bool finite = true;
                for (std::size_t s = anchor; s >= 2; s /= 2) {
                    interpolate_level(buf, ext, s, static_cast<InterpMethod>(m), [&](std::size_t flat, double pred) {
                        finite = finite && std::isfinite(pred) && std::isnan(buf[flat]);
                        ++visits[flat];
                        return pred;
                    });
                }
                std::size_t anchors = 1;
                for (auto e : ext) anchors *= anchor_extent(e, anchor);
                std::size_t once = 0, bad = 0;
                for (auto c : visits) {
                    if (c == 1) ++once;
                    else if (c != 0) ++bad;
                }
                CHECK_MESSAGE(finite, "shape " << ext[0] << "x" << ext[1] << "x" << ext[2]);
                CHECK(bad == 0);
                CHECK(once == n - anchors);
            }
        }
    }
}

TEST_CASE("parity passes partition 5x5x5") {
    const Index3 ext{5, 5, 5};
    std::vector<int> visits(125, 0);
    std::size_t prev_popcount = 0;
    for (const auto& pass : parity_passes(2)) {
        const auto pc = static_cast<std::size_t>(std::popcount(pass.odd_mask));
        CHECK(pc >= prev_popcount);
        prev_popcount = pc;
        for_each_point(pass, ext, [&](const Index3& p, std::size_t flat) {
            unsigned mask = 0;
            for (int a = 0; a < 3; ++a) mask |= unsigned(p[a] % 2) << a;
            CHECK(mask == pass.odd_mask);
            ++visits[flat];
        });
    }
    for (std::size_t f = 0; f < 125; ++f) {
        const bool known = (f / 25) % 2 == 0 && (f / 5 % 5) % 2 == 0 && (f % 5) % 2 == 0;
        CHECK(visits[f] == (known ? 0 : 1));
    }
}

TEST_CASE("final level fraction") {
    const Index3 e2{1, 2049, 2049};
    std::size_t new2 = 0;
    for (const auto& pass : sequential_passes(2)) new2 += count_points(pass, e2);
    CHECK(double(new2) / double(2049 * 2049) == doctest::Approx(0.75).epsilon(0.02));
    const Index3 e3{257, 257, 257};
    std::size_t new3 = 0;
    for (const auto& pass : parity_passes(2)) new3 += count_points(pass, e3);
    CHECK(double(new3) / (257.0 * 257 * 257) == doctest::Approx(0.875).epsilon(0.02));
}
