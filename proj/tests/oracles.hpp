#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "srnsz/tensor.hpp"

namespace srnsz::testing {

/// Round half away from zero, written out by hand.
inline double round_away(double x) {
    const double a = std::floor(std::abs(x) + 0.5);
    return x < 0 ? -a : a;
}

struct QuantExpected {
    bool outlier;
    std::uint32_t symbol;
    double recon;
};

/// Quantization by direct arithmetic, f64 storage.
inline QuantExpected quantize_oracle(double pred, double actual, double e, std::uint32_t radius) {
    const double k = round_away((actual - pred) / (2 * e));
    if (std::isfinite(k) && std::abs(k) < radius) {
        const double recon = pred + 2 * e * k;
        if (std::abs(actual - recon) <= e) {
            return {false, static_cast<std::uint32_t>(static_cast<std::int64_t>(k) + radius), recon};
        }
    }
    return {true, 0, actual};
}

/// Direct evaluation of (-a + 9b + 9c - d) / 16.
inline double cubic_oracle(double a, double b, double c, double d) { return (9.0 * (b + c) - (a + d)) / 16.0; }

inline Tensor<float> random_tensor(Eigen::Index c, Eigen::Index h, Eigen::Index w, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> u(-1, 1);
    Tensor<float> t(c, h, w);
    for (Eigen::Index i = 0; i < t.data.size(); ++i) t.data.data()[i] = u(rng);
    return t;
}

/// Direct zero-padded convolution in double.
inline Tensor<double> naive_conv(const Tensor<float>& in, const ConvWeights<float>& w) {
    using Index = Eigen::Index;
    const Index k = w.kernel, pad = k / 2;
    Tensor<double> out(w.out_channels(), in.height, in.width);
    for (Index co = 0; co < w.out_channels(); ++co)
        for (Index y = 0; y < in.height; ++y)
            for (Index x = 0; x < in.width; ++x) {
                double s = w.bias(co);
                for (Index ci = 0; ci < in.channels; ++ci)
                    for (Index ky = 0; ky < k; ++ky)
                        for (Index kx = 0; kx < k; ++kx) {
                            const Index sy = y + ky - pad, sx = x + kx - pad;
                            if (sy < 0 || sx < 0 || sy >= in.height || sx >= in.width) continue;
                            s += double(w.weight(co, (ci * k + ky) * k + kx)) * in(ci, sy, sx);
                        }
                out(co, y, x) = s;
            }
    return out;
}

/// Max absolute error relative to the largest oracle magnitude.
inline double max_rel(const Tensor<float>& got, const Tensor<double>& want) {
    double scale = 0.0, err = 0.0;
    for (Eigen::Index i = 0; i < want.data.size(); ++i) {
        scale = std::max(scale, std::abs(want.data.data()[i]));
        err = std::max(err, std::abs(double(got.data.data()[i]) - want.data.data()[i]));
    }
    return err / std::max(scale, 1e-30);
}

}  // namespace srnsz::testing
