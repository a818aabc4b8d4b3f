// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fstk/camera.hpp"
#include "fstk/types.hpp"

namespace fstk {

/// True exactly for pixels whose radius from the principal point stays
/// within the radius of the field-of-view circle, 2 f sin(fov / 4).
Mask build_fov_mask(const CameraModel& cam, Index rows, Index cols);

/// Chessboard erosion by `margin` pixels; anything outside the image
/// counts as false.
Mask erode(const Mask& mask, int margin);

/// Luminance PSNR over masked pixels only, peak fixed at 255.  Returns
/// +infinity when the masked regions agree exactly.  Throws contract_error
/// on dimension mismatch or an empty mask.
double psnr_masked(const Image& test, const Image& ref, const Mask& mask);

}  // namespace fstk
