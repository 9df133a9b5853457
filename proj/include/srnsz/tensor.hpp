#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "srnsz/error.hpp"

namespace srnsz {

/// Feature map of shape channels x height x width. Each channel is one row of
/// `data`, laid out row-major over (y, x), so per-pixel channel mixing is a
/// plain matrix product.
template <typename Scalar>
struct Tensor {
    using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Eigen::Index channels = 0;
    Eigen::Index height = 0;
    Eigen::Index width = 0;
    Storage data;

    Tensor() = default;
    Tensor(Eigen::Index c, Eigen::Index h, Eigen::Index w)
        : channels(c), height(h), width(w), data(Storage::Zero(c, h * w)) {}

    [[nodiscard]] Scalar& operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) {
        return data(c, y * width + x);
    }
    [[nodiscard]] Scalar operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) const {
        return data(c, y * width + x);
    }
};

/// Weights of a stride-1 "same" convolution: `weight` is
/// out_channels x (in_channels * k * k) with column index (ci * k + ky) * k + kx.
template <typename Scalar>
struct ConvWeights {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weight;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bias;
    Eigen::Index kernel = 1;

    [[nodiscard]] Eigen::Index in_channels() const { return weight.cols() / (kernel * kernel); }
    [[nodiscard]] Eigen::Index out_channels() const { return weight.rows(); }
    [[nodiscard]] Eigen::Index padding() const { return kernel / 2; }
};

/// Zero-padded stride-1 convolution via row-chunked im2col and one GEMM per chunk.
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& in, const ConvWeights<Scalar>& w) {
    const Eigen::Index k = w.kernel;
    const Eigen::Index pad = w.padding();
    const Eigen::Index cin = w.in_channels();
    if (cin != in.channels) throw ContractError("conv2d channel mismatch");
    const Eigen::Index H = in.height;
    const Eigen::Index W = in.width;
    Tensor<Scalar> out(w.out_channels(), H, W);

    const Eigen::Index patch = cin * k * k;
    constexpr Eigen::Index kMaxColumnsElements = Eigen::Index{1} << 22;
    const Eigen::Index rows_per_chunk =
        std::max<Eigen::Index>(1, std::min<Eigen::Index>(H, kMaxColumnsElements / std::max<Eigen::Index>(1, patch * W)));
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cols;

    for (Eigen::Index y0 = 0; y0 < H; y0 += rows_per_chunk) {
        const Eigen::Index rows = std::min(rows_per_chunk, H - y0);
        cols.setZero(patch, rows * W);
        for (Eigen::Index ci = 0; ci < cin; ++ci) {
            for (Eigen::Index ky = 0; ky < k; ++ky) {
                for (Eigen::Index kx = 0; kx < k; ++kx) {
                    const Eigen::Index r = (ci * k + ky) * k + kx;
                    for (Eigen::Index y = 0; y < rows; ++y) {
                        const Eigen::Index sy = y0 + y + ky - pad;
                        if (sy < 0 || sy >= H) continue;
                        const Eigen::Index x_lo = std::max<Eigen::Index>(0, pad - kx);
                        const Eigen::Index x_hi = std::min<Eigen::Index>(W, W + pad - kx);
                        for (Eigen::Index x = x_lo; x < x_hi; ++x) {
                            cols(r, y * W + x) = in.data(ci, sy * W + x + kx - pad);
                        }
                    }
                }
            }
        }
        auto block = out.data.middleCols(y0 * W, rows * W);
        block.noalias() = w.weight * cols;
        block.colwise() += w.bias;
    }
    return out;
}

enum class Activation { relu, gelu, leaky_relu };

template <typename Scalar>
void apply_activation(Tensor<Scalar>& t, Activation fn, Scalar slope = Scalar(0.01)) {
    switch (fn) {
        case Activation::relu:
            t.data = t.data.cwiseMax(Scalar(0));
            break;
        case Activation::leaky_relu:
            t.data = t.data.unaryExpr([slope](Scalar v) { return v >= Scalar(0) ? v : slope * v; });
            break;
        case Activation::gelu:
            t.data = t.data.unaryExpr([](Scalar v) {
                return Scalar(0.5) * v * (Scalar(1) + std::erf(v / std::sqrt(Scalar(2))));
            });
            break;
    }
}

/// Squeeze-and-excitation channel attention: global average pool, FC ->
/// ReLU -> FC -> sigmoid, then rescale each channel.
template <typename Scalar>
struct ChannelAttentionWeights {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> fc1;  // (C/r) x C
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b1;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> fc2;  // C x (C/r)
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b2;
};

template <typename Scalar>
Tensor<Scalar> channel_attention(const Tensor<Scalar>& in, const ChannelAttentionWeights<Scalar>& w) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pooled =
        in.data.rowwise().sum() / static_cast<Scalar>(in.height * in.width);
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hidden = (w.fc1 * pooled + w.b1).cwiseMax(Scalar(0));
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gate =
        (w.fc2 * hidden + w.b2).unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
    Tensor<Scalar> out = in;
    out.data = gate.asDiagonal() * in.data;
    return out;
}

/// out(c, y*r + i, x*r + j) = in(c*r*r + i*r + j, y, x).
template <typename Scalar>
Tensor<Scalar> pixel_shuffle(const Tensor<Scalar>& in, Eigen::Index factor) {
    const Eigen::Index rr = factor * factor;
    if (in.channels % rr != 0) throw ContractError("pixel_shuffle channels not divisible by factor^2");
    Tensor<Scalar> out(in.channels / rr, in.height * factor, in.width * factor);
    for (Eigen::Index c = 0; c < out.channels; ++c) {
        for (Eigen::Index i = 0; i < factor; ++i) {
            for (Eigen::Index j = 0; j < factor; ++j) {
                const Eigen::Index src = c * rr + i * factor + j;
                for (Eigen::Index y = 0; y < in.height; ++y) {
                    for (Eigen::Index x = 0; x < in.width; ++x) {
                        out(c, y * factor + i, x * factor + j) = in(src, y, x);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace srnsz
