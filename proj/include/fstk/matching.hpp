// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fstk/camera.hpp"
#include "fstk/types.hpp"

namespace fstk {

enum class CostMetric { ssd };

/// Block-matching parameters.  The block is (2w+1) x (2w+1) around the
/// pixel; candidate offsets span [0, search_range].
struct MatchConfig {
  int support_width = 8;
  int search_range = 256;
  CostMetric metric = CostMetric::ssd;

  int block_size() const { return 2 * support_width + 1; }
};

/// What the stored offsets mean.  Conventional matching stores fisheye
/// pixel offsets; projection-aware matching stores offsets measured in the
/// perspective plane, which translate to two-dimensional fisheye moves.
enum class DisparityDomain { pixel_horizontal, perspective_horizontal };

/// Dense right-to-left disparity, same dimensions as the views.
struct DisparityMap {
  Image values;
  DisparityDomain domain = DisparityDomain::pixel_horizontal;
};

/// Sum of squared differences between two equally shaped blocks.
/// Zero iff the blocks are identical.
double ssd_cost(const Image& block_a, const Image& block_b);

/// Per-pixel sampling positions in the reference view for one candidate
/// offset: the grid is shared by every block at that offset.
struct WarpGrid {
  Grid row;
  Grid col;
};

/// Builds the shared sampling grid for candidate offset `offset`:
/// every pixel is projected to the perspective plane, shifted by `offset`
/// columns there, and re-projected.  Entries may fall outside the image;
/// sampling clamps later.
WarpGrid build_candidate_warp_grid(int offset, const CameraModel& cam,
                                   Index rows, Index cols, int threads = 0);

/// Conventional horizontal block matching on rectified views.
/// Ties break toward the smallest candidate; every pixel gets a value.
DisparityMap estimate_disparity_horizontal(const Image& left,
                                           const Image& right,
                                           const MatchConfig& cfg,
                                           int threads = 0);

/// Projection-aware matching: candidate blocks gather reference luminance
/// at warp-grid positions instead of integer-shifted ones.  Stored offsets
/// are perspective-domain horizontal disparities.
DisparityMap estimate_disparity_fisheye(const Image& left, const Image& right,
                                        const MatchConfig& cfg,
                                        const CameraModel& cam,
                                        int threads = 0);

}  // namespace fstk
