#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "srnsz/bundle.hpp"
#include "srnsz/grid.hpp"
#include "srnsz/lattice.hpp"

namespace srnsz {

using Plane = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Smallest LR extent the network is run on.
inline constexpr Eigen::Index kMinSrExtent = 8;
/// Slices above this size are inferred in overlapping tiles.
inline constexpr Eigen::Index kSrTileLimit = 512;
inline constexpr Eigen::Index kSrTileOverlap = 16;

/// 2H x 2W prediction for an H x W plane given in value space. The plane is
/// mapped to [0, 1] with `norm` before inference and the network output is
/// mapped back. Throws ContractError when either extent is below kMinSrExtent.
Plane sr_predict_2d(const ModelBundle& model, const Plane& lr, const NormalizationParams& norm);

/// Slice families of a 3D grid, named by the plane they span. xy fixes
/// axis 2, xz fixes axis 1, yz fixes axis 0.
enum class SliceOrientation : std::uint8_t { xy = 0, xz = 1, yz = 2 };

constexpr int fixed_axis(SliceOrientation o) noexcept { return 2 - static_cast<int>(o); }

struct SlicePrediction {
    SliceOrientation orientation = SliceOrientation::xy;
    std::size_t slice_index = 0;  // position of the slice along the fixed axis, in grid coordinates
    Plane predicted;              // full 2m x 2m' network output before cropping
};

/// How a point of the refined lattice receives its value in an SR level.
enum class PointRule : std::uint8_t {
    off_level,           // not a multiple of stride/2 on some axis
    known,               // all coordinates even: already reconstructed
    two_direction_mean,  // one odd coordinate: mean of the two covering slice orientations
    single_direction,    // two odd coordinates: the one covering orientation
    center_spline,       // three odd coordinates: multi-dimensional spline
};

PointRule classify_refinement_point(const Index3& p, std::size_t stride);

/// Slice predictions accumulated per grid point of an SR level.
struct FacePredictions {
    std::vector<double> sum;
    std::vector<std::uint8_t> count;

    [[nodiscard]] double value(std::size_t flat) const { return sum[flat] / count[flat]; }
};

/// Runs the network on every LR slice of the level (`recon` known at
/// multiples of `stride`). For 2D grids (`ndims == 2`, padded axis 0) only the
/// single plane is used; for 3D all three orientations are. Each point with
/// one or two odd coordinates collects the predictions of the slices that
/// cover it. `visit`, when set, observes each slice before accumulation.
FacePredictions sr_predict_faces(const ModelBundle& model, const LatticeView<const double>& recon,
                                 std::size_t stride, std::size_t ndims, const NormalizationParams& norm,
                                 const std::function<void(const SlicePrediction&)>& visit = {});

/// Predictions for every new point of a 3D SR level, with the rule used.
struct RefinementPredictions {
    std::vector<double> values;  // NaN where nothing is predicted
    std::vector<PointRule> rules;
};

/// Standalone form of the 3D level: slice predictions for face and edge
/// points; cube centers from the multi-dimensional spline over a copy of
/// `recon` in which the face/edge points hold their slice predictions.
RefinementPredictions sr_predict_3d_via_slices(const ModelBundle& model, const DataGrid& recon, std::size_t stride,
                                               const NormalizationParams& norm);

}  // namespace srnsz
