#include "srnsz/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

namespace srnsz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Point = std::array<double, 3>;

/// Uniform on [lo, hi) from the top 53 bits; std::uniform_real_distribution
/// is implementation defined.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

private:
    std::mt19937_64 rng_;
};

Point random_point(Draw& d, std::size_t ndims) {
    Point p{0, 0, 0};
    for (std::size_t a = 3 - ndims; a < 3; ++a) p[a] = d.uniform();
    return p;
}

template <typename Fn>
DataGrid sample(const Shape& shape, Fn&& fn) {
    const auto ext = shape.padded3();
    DataGrid::Values values(static_cast<Eigen::Index>(shape.count()));
    Eigen::Index flat = 0;
    auto coord = [](std::size_t i, std::size_t n) { return n > 1 ? double(i) / double(n - 1) : 0.0; };
    for (std::size_t i = 0; i < ext[0]; ++i) {
        for (std::size_t j = 0; j < ext[1]; ++j) {
            for (std::size_t k = 0; k < ext[2]; ++k) {
                const Point x{coord(i, ext[0]), coord(j, ext[1]), coord(k, ext[2])};
                values[flat++] = static_cast<double>(static_cast<float>(fn(x)));
            }
        }
    }
    return DataGrid(shape, std::move(values), Precision::f32);
}

DataGrid bumps(const FieldSpec& spec, Draw& d) {
    const std::size_t nd = spec.shape.ndims();
    struct Bump { Point c; double inv2w2, amp; };
    std::vector<Bump> list;
    for (int i = 0; i < spec.components; ++i) {
        const Point c = random_point(d, nd);
        const double w = d.uniform(0.05, 0.25);
        list.push_back({c, 1.0 / (2 * w * w), d.uniform(-1.0, 1.0)});
    }
    return sample(spec.shape, [&](const Point& x) {
        double v = 0.0;
        for (const auto& b : list) {
            double r2 = 0.0;
            for (int a = 0; a < 3; ++a) r2 += (x[a] - b.c[a]) * (x[a] - b.c[a]);
            v += b.amp * std::exp(-r2 * b.inv2w2);
        }
        return v;
    });
}

DataGrid fourier(const FieldSpec& spec, Draw& d) {
    const std::size_t nd = spec.shape.ndims();
    const int kmax = static_cast<int>(std::floor(spec.max_frequency));
    struct Mode { std::array<int, 3> k; double amp, phase; };
    std::vector<Mode> modes;
    for (int i = 0; i < spec.components; ++i) {
        Mode m{{0, 0, 0}, 0, 0};
        double norm2 = 0.0;
        for (std::size_t a = 3 - nd; a < 3; ++a) {
            m.k[a] = d.integer(-kmax, kmax);
            norm2 += double(m.k[a]) * m.k[a];
        }
        m.amp = d.uniform(0.5, 1.0) / std::pow(1.0 + std::sqrt(norm2), spec.smoothness);
        m.phase = d.uniform(0.0, kTwoPi);
        modes.push_back(m);
    }
    return sample(spec.shape, [&](const Point& x) {
        double v = 0.0;
        for (const auto& m : modes) {
            const double arg = kTwoPi * (m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2]) + m.phase;
            v += m.amp * std::cos(arg);
        }
        return v;
    });
}

DataGrid vortex(const FieldSpec& spec, Draw& d) {
    const std::size_t nd = spec.shape.ndims();
    struct Vortex { Point c; double gamma, inv_s2; };
    std::vector<Vortex> list;
    for (int i = 0; i < spec.components; ++i) {
        const Point c = random_point(d, nd);
        const double s = d.uniform(0.08, 0.2);
        list.push_back({c, d.uniform(-3.0, 3.0), 1.0 / (s * s)});
    }
    const double f = std::max(1.0, spec.max_frequency);
    const double tilt = d.uniform(0.0, kTwoPi);
    // Rotation in the last two axes (the first of them is axis 1 for 3D and 2D).
    return sample(spec.shape, [&](const Point& x) {
        Point q = x;
        for (const auto& v : list) {
            const double dy = x[1] - v.c[1], dz = x[2] - v.c[2], dx = x[0] - v.c[0];
            const double angle = v.gamma * std::exp(-(dx * dx + dy * dy + dz * dz) * v.inv_s2);
            const double c = std::cos(angle), s = std::sin(angle);
            q[1] += (c - 1) * dy - s * dz;
            q[2] += s * dy + (c - 1) * dz;
        }
        const double u = std::cos(tilt) * q[1] + std::sin(tilt) * q[2];
        return std::sin(kTwoPi * f * u) + 0.5 * std::cos(kTwoPi * 0.5 * f * (q[0] + q[1] - q[2]));
    });
}

DataGrid fronts(const FieldSpec& spec, Draw& d) {
    const std::size_t nd = spec.shape.ndims();
    struct Front { Point n; double offset, jump; };
    std::vector<Front> list;
    for (int i = 0; i < spec.components; ++i) {
        Point n{0, 0, 0};
        double len = 0.0;
        for (std::size_t a = 3 - nd; a < 3; ++a) {
            n[a] = d.uniform(-1.0, 1.0);
            len += n[a] * n[a];
        }
        len = std::sqrt(len);
        if (len < 1e-6) {
            n[2] = 1.0;
            len = 1.0;
        }
        for (auto& c : n) c /= len;
        const Point p = random_point(d, nd);
        list.push_back({n, n[0] * p[0] + n[1] * p[1] + n[2] * p[2], d.uniform(-1.0, 1.0)});
    }
    const double gx = d.uniform(-0.5, 0.5), gy = d.uniform(-0.5, 0.5);
    return sample(spec.shape, [&](const Point& x) {
        double v = gx * std::sin(kTwoPi * x[1]) + gy * std::cos(kTwoPi * x[2]);
        for (const auto& f : list) {
            const double dist = f.n[0] * x[0] + f.n[1] * x[1] + f.n[2] * x[2] - f.offset;
            v += f.jump * std::tanh(spec.sharpness * dist);
        }
        return v;
    });
}

}  // namespace

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::gaussian_mixture_bumps: return "gaussian_mixture_bumps";
        case FieldKind::band_limited_fourier: return "band_limited_fourier";
        case FieldKind::advected_vortex: return "advected_vortex";
        case FieldKind::piecewise_fronts: return "piecewise_fronts";
    }
    return "?";
}

FieldKind field_kind_from_string(const std::string& s) {
    for (auto k : {FieldKind::gaussian_mixture_bumps, FieldKind::band_limited_fourier, FieldKind::advected_vortex,
                   FieldKind::piecewise_fronts}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown field kind '" + s + "'");
}

nlohmann::json to_json(const FieldSpec& spec) {
    return {{"kind", to_string(spec.kind)},
            {"shape", spec.shape.extents()},
            {"seed", spec.seed},
            {"components", spec.components},
            {"max_frequency", spec.max_frequency},
            {"smoothness", spec.smoothness},
            {"sharpness", spec.sharpness}};
}

FieldSpec field_spec_from_json(const nlohmann::json& j) {
    try {
        FieldSpec spec;
        spec.kind = field_kind_from_string(j.at("kind").get<std::string>());
        spec.shape = Shape(j.at("shape").get<std::vector<std::size_t>>());
        spec.seed = j.value("seed", spec.seed);
        spec.components = j.value("components", spec.components);
        spec.max_frequency = j.value("max_frequency", spec.max_frequency);
        spec.smoothness = j.value("smoothness", spec.smoothness);
        spec.sharpness = j.value("sharpness", spec.sharpness);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad field spec: ") + e.what());
    }
}

DataGrid generate(const FieldSpec& spec) {
    if (spec.components < 1) throw ConfigError("field spec needs at least one component");
    if (spec.max_frequency < 0) throw ConfigError("max_frequency must be >= 0");
    Draw d(spec.seed);
    switch (spec.kind) {
        case FieldKind::gaussian_mixture_bumps: return bumps(spec, d);
        case FieldKind::band_limited_fourier: return fourier(spec, d);
        case FieldKind::advected_vortex: return vortex(spec, d);
        case FieldKind::piecewise_fronts: return fronts(spec, d);
    }
    throw ConfigError("unknown field kind");
}

}  // namespace srnsz
