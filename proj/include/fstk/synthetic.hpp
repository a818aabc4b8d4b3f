// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fstk/camera.hpp"
#include "fstk/matching.hpp"
#include "fstk/types.hpp"

namespace fstk {

/// Fronto-parallel textured plane at depth `depth` (scene units, > 0).
/// The texture is an analytic, seeded sum of band-limited 2-D sinusoids,
/// so renders are exact at any sub-pixel position.  Extent defaults to
/// infinite; finite extents let nearer planes occlude farther ones.
struct PlaneSpec {
  double depth = 1.0;
  std::uint32_t seed = 1;
  double center_x = 0.0;
  double center_y = 0.0;
  double width = std::numeric_limits<double>::infinity();
  double height = std::numeric_limits<double>::infinity();
  int waves = 16;
};

/// Ground-truth stereo scene: cameras displaced along +columns by
/// `baseline`, left view at offset 0, right view at offset `baseline`.
struct SceneSpec {
  std::vector<PlaneSpec> planes;
  double baseline = 0.2;
  CameraModel camera;
  Index rows = 0;
  Index cols = 0;
};

void validate(const SceneSpec& scene);

/// Loads a scene from the shared key=value format (`width`, `height`,
/// `focal_length_px`, `baseline`, `plane1_depth`, `plane1_seed`, ...).
SceneSpec load_scene(const std::string& path);

/// Renders the view of a camera displaced by `camera_offset` scene units
/// along +columns.  Pixels beyond the field-of-view circle, or whose rays
/// miss every plane, are 0.
Image render_fisheye_view(const SceneSpec& scene, double camera_offset,
                          int threads = 0);

/// Exact perspective-domain disparity of the right view (offset
/// `baseline`): d = f * B / Z of the nearest plane hit per pixel, 0 where
/// no plane is seen.
DisparityMap ground_truth_disparity(const SceneSpec& scene, int threads = 0);

}  // namespace fstk
