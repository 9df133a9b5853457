#include "srnsz/sr_inference.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "srnsz/interp.hpp"

namespace srnsz {

namespace {

Plane infer_tile(const Network& net, const Plane& lr, const NormalizationParams& norm) {
    Tensor<float> input(1, lr.rows(), lr.cols());
    if (norm.range > 0) {
        for (Eigen::Index i = 0; i < lr.size(); ++i) {
            input.data(0, i) = static_cast<float>((lr.data()[i] - norm.minimum) / norm.range);
        }
    }
    const Tensor<float> out = net.forward(input);
    Plane hr(out.height, out.width);
    for (Eigen::Index i = 0; i < hr.size(); ++i) {
        hr.data()[i] = norm.minimum + norm.range * static_cast<double>(out.data(0, i));
    }
    return hr;
}

}  // namespace

Plane sr_predict_2d(const ModelBundle& model, const Plane& lr, const NormalizationParams& norm) {
    if (lr.rows() < kMinSrExtent || lr.cols() < kMinSrExtent) {
        throw ContractError("super-resolution input must be at least 8x8; use interpolation instead");
    }
    const Network& net = model.network();
    if (lr.rows() <= kSrTileLimit && lr.cols() <= kSrTileLimit) return infer_tile(net, lr, norm);

    const Eigen::Index core = kSrTileLimit - 2 * kSrTileOverlap;
    Plane hr(2 * lr.rows(), 2 * lr.cols());
    for (Eigen::Index y0 = 0; y0 < lr.rows(); y0 += core) {
        const Eigen::Index y1 = std::min(lr.rows(), y0 + core);
        const Eigen::Index ey0 = std::max<Eigen::Index>(0, y0 - kSrTileOverlap);
        const Eigen::Index ey1 = std::min(lr.rows(), y1 + kSrTileOverlap);
        for (Eigen::Index x0 = 0; x0 < lr.cols(); x0 += core) {
            const Eigen::Index x1 = std::min(lr.cols(), x0 + core);
            const Eigen::Index ex0 = std::max<Eigen::Index>(0, x0 - kSrTileOverlap);
            const Eigen::Index ex1 = std::min(lr.cols(), x1 + kSrTileOverlap);
            const Plane tile = infer_tile(net, lr.block(ey0, ex0, ey1 - ey0, ex1 - ex0), norm);
            hr.block(2 * y0, 2 * x0, 2 * (y1 - y0), 2 * (x1 - x0)) =
                tile.block(2 * (y0 - ey0), 2 * (x0 - ex0), 2 * (y1 - y0), 2 * (x1 - x0));
        }
    }
    return hr;
}

PointRule classify_refinement_point(const Index3& p, std::size_t stride) {
    const std::size_t half = stride / 2;
    int odd = 0;
    for (auto c : p) {
        if (c % half != 0) return PointRule::off_level;
        odd += is_odd_at(c, stride) ? 1 : 0;
    }
    switch (odd) {
        case 0: return PointRule::known;
        case 1: return PointRule::two_direction_mean;
        case 2: return PointRule::single_direction;
        default: return PointRule::center_spline;
    }
}

FacePredictions sr_predict_faces(const ModelBundle& model, const LatticeView<const double>& recon,
                                 std::size_t stride, std::size_t ndims, const NormalizationParams& norm,
                                 const std::function<void(const SlicePrediction&)>& visit) {
    const auto& ext = recon.extents();
    const std::size_t half = stride / 2;
    FacePredictions faces;
    faces.sum.assign(recon.data().size(), 0.0);
    faces.count.assign(recon.data().size(), 0);

    std::vector<SliceOrientation> orientations{SliceOrientation::yz};
    if (ndims == 3) orientations = {SliceOrientation::xy, SliceOrientation::xz, SliceOrientation::yz};

    for (auto orientation : orientations) {
        const int a = fixed_axis(orientation);
        const int b = a == 0 ? 1 : 0;
        const int c = a == 2 ? 1 : 2;
        const auto lr_rows = static_cast<Eigen::Index>((ext[b] - 1) / stride + 1);
        const auto lr_cols = static_cast<Eigen::Index>((ext[c] - 1) / stride + 1);
        const auto hr_rows = static_cast<Eigen::Index>((ext[b] - 1) / half + 1);
        const auto hr_cols = static_cast<Eigen::Index>((ext[c] - 1) / half + 1);
        Plane lr(lr_rows, lr_cols);
        for (std::size_t fixed = 0; fixed < ext[a]; fixed += stride) {
            Index3 p{};
            p[a] = fixed;
            for (Eigen::Index i = 0; i < lr_rows; ++i) {
                for (Eigen::Index j = 0; j < lr_cols; ++j) {
                    p[b] = static_cast<std::size_t>(i) * stride;
                    p[c] = static_cast<std::size_t>(j) * stride;
                    lr(i, j) = recon.at(p);
                }
            }
            SlicePrediction slice{orientation, fixed, sr_predict_2d(model, lr, norm)};
            if (visit) visit(slice);
            // Output (2i, 2j) coincides with input (i, j); rows/columns past
            // the grid edge are cropped away.
            for (Eigen::Index I = 0; I < hr_rows; ++I) {
                for (Eigen::Index J = 0; J < hr_cols; ++J) {
                    if (I % 2 == 0 && J % 2 == 0) continue;
                    p[b] = static_cast<std::size_t>(I) * half;
                    p[c] = static_cast<std::size_t>(J) * half;
                    const std::size_t flat = recon.flat(p);
                    faces.sum[flat] += slice.predicted(I, J);
                    ++faces.count[flat];
                }
            }
        }
    }
    return faces;
}

RefinementPredictions sr_predict_3d_via_slices(const ModelBundle& model, const DataGrid& recon, std::size_t stride,
                                               const NormalizationParams& norm) {
    if (recon.ndims() != 3) throw DomainError("sr_predict_3d_via_slices needs a 3D grid");
    const auto ext = recon.shape().padded3();
    LatticeView<const double> view(recon.span(), ext);
    const auto faces = sr_predict_faces(model, view, stride, 3, norm);

    RefinementPredictions out;
    out.values.assign(recon.size(), std::numeric_limits<double>::quiet_NaN());
    out.rules.assign(recon.size(), PointRule::off_level);
    std::vector<double> filled(recon.span().begin(), recon.span().end());
    LatticeView<double> filled_view(filled, ext);

    for (const auto& pass : parity_passes(stride)) {
        for_each_point(pass, ext, [&](const Index3& p, std::size_t flat) {
            out.rules[flat] = classify_refinement_point(p, stride);
            if (out.rules[flat] == PointRule::center_spline) return;
            out.values[flat] = faces.value(flat);
            filled[flat] = out.values[flat];
        });
    }
    for (const auto& pass : parity_passes(stride)) {
        if (pass.odd_mask != 7u) continue;
        for_each_point(pass, ext, [&](const Index3& p, std::size_t flat) {
            out.values[flat] = predict_multidim_spline(filled_view, p, stride);
        });
    }
    for (std::size_t i = 0; i < ext[0]; i += stride) {
        for (std::size_t j = 0; j < ext[1]; j += stride) {
            for (std::size_t k = 0; k < ext[2]; k += stride) out.rules[view.flat({i, j, k})] = PointRule::known;
        }
    }
    return out;
}

}  // namespace srnsz
