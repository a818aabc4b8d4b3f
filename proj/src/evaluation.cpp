// SPDX-License-Identifier: Apache-2.0
#include "fstk/evaluation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fstk {

Mask build_fov_mask(const CameraModel& cam, Index rows, Index cols) {
  validate(cam);
  const double half_fov =
      std::min(cam.fov_deg * std::numbers::pi / 360.0, std::numbers::pi);
  const double radius = equisolid_project(half_fov, cam);
  const double radius2 = radius * radius;
  Mask mask(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const double dm = static_cast<double>(r) - cam.center_row;
    for (Index c = 0; c < cols; ++c) {
      const double dn = static_cast<double>(c) - cam.center_col;
      mask(r, c) = dm * dm + dn * dn <= radius2;
    }
  }
  return mask;
}

Mask erode(const Mask& mask, int margin) {
  if (margin <= 0) return mask;
  const Index rows = mask.rows(), cols = mask.cols();
  // Separable sweep: rows first, then columns; off-image counts as false.
  Mask pass(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      bool keep = c - margin >= 0 && c + margin < cols;
      for (Index d = -margin; keep && d <= margin; ++d)
        keep = mask(r, c + d);
      pass(r, c) = keep;
    }
  Mask out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      bool keep = r - margin >= 0 && r + margin < rows;
      for (Index d = -margin; keep && d <= margin; ++d)
        keep = pass(r + d, c);
      out(r, c) = keep;
    }
  return out;
}

double psnr_masked(const Image& test, const Image& ref, const Mask& mask) {
  if (test.rows() != ref.rows() || test.cols() != ref.cols() ||
      test.rows() != mask.rows() || test.cols() != mask.cols())
    throw contract_error("psnr_masked: dimensions differ");
  // Fixed raster-order accumulation keeps the result reproducible.
  double sum = 0.0;
  long count = 0;
  for (Index r = 0; r < test.rows(); ++r)
    for (Index c = 0; c < test.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double diff =
          static_cast<double>(test(r, c)) - static_cast<double>(ref(r, c));
      sum += diff * diff;
      ++count;
    }
  if (count == 0) throw contract_error("psnr_masked: mask selects no pixels");
  const double mse = sum / static_cast<double>(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace fstk
