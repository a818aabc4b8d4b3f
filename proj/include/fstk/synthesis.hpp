// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fstk/camera.hpp"
#include "fstk/matching.hpp"
#include "fstk/types.hpp"

namespace fstk {

/// How scattered warp targets are resampled back to the integer grid.
/// `linear` is barycentric interpolation over the Delaunay triangulation;
/// `cubic` is a C1 piecewise-cubic (Clough-Tocher split) over the same
/// triangulation with least-squares vertex gradients.
enum class ScatterInterp { linear, cubic };

struct SynthesisConfig {
  double alpha = 0.5;  // fraction of the disparity applied
  ScatterInterp interpolation = ScatterInterp::linear;
};

/// One warp target per source pixel, raster order preserved.  `value` may
/// be left empty by target computation; synthesis attaches the source
/// luminance before resampling.
struct WarpTargets {
  Grid row;
  Grid col;
  Image value;
};

/// Forward-warps the right view by alpha times the pixel-domain disparity
/// and resamples to the integer grid.  Requires a pixel_horizontal map.
Image synthesize_conventional(const Image& right, const DisparityMap& disparity,
                              const SynthesisConfig& cfg, int threads = 0);

/// Per-pixel warp destinations for the projection-aware path: each pixel is
/// projected to the perspective plane, shifted by alpha * disparity there,
/// and re-projected.  Requires a perspective_horizontal map.
WarpTargets compute_fisheye_warp_targets(const DisparityMap& disparity,
                                         const SynthesisConfig& cfg,
                                         const CameraModel& cam,
                                         int threads = 0);

/// Scattered-to-grid resampling: deduplicates exactly coincident targets
/// (last writer in raster order wins), triangulates, and interpolates every
/// grid position inside the convex hull.  Positions outside the hull become
/// 0; output is clamped to [0, 255].  Throws contract_error when fewer than
/// 3 non-collinear targets remain.
Image resample_scattered(const WarpTargets& targets, Index rows, Index cols,
                         const SynthesisConfig& cfg, int threads = 0);

/// compute_fisheye_warp_targets followed by resample_scattered.
Image synthesize_fisheye(const Image& right, const DisparityMap& disparity,
                         const SynthesisConfig& cfg, const CameraModel& cam,
                         int threads = 0);

}  // namespace fstk
