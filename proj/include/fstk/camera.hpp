// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fstk/types.hpp"

namespace fstk {

/// Equisolid-angle fisheye intrinsics.
///
/// The lens maps the incident angle theta (against the optical axis) to the
/// image-plane radius r = 2 f sin(theta / 2).  The matching perspective
/// radius is r_p = f tan(theta) up to `theta_lim_rad`; beyond that onset the
/// perspective map is continued linearly in theta with matched value and
/// first derivative, which keeps it finite and exactly invertible for
/// fields of view past 180 degrees.  The exact wide-angle behaviour of real
/// lenses is lens-specific; the linear continuation is a documented stand-in.
struct CameraModel {
  double focal_length_px = 0.0;
  double center_row = 0.0;
  double center_col = 0.0;
  double fov_deg = 185.0;
  double theta_lim_rad = 85.0 * 3.14159265358979323846 / 180.0;
};

/// Throws contract_error unless f > 0, 0 < theta_lim < pi/2, 0 < fov <= 360.
void validate(const CameraModel& cam);

/// Polar point in the fisheye image plane, radius in pixels from the
/// principal point, phi in (-pi, pi] with phi = 0 along +columns and
/// increasing counter-clockwise (rows point down, hence the sign flip).
struct PolarFisheye {
  double radius_px = 0.0;
  double phi = 0.0;
};

/// Polar point in the virtual perspective plane; phi is shared with the
/// fisheye representation of the same point.
struct PolarPerspective {
  double radius_px = 0.0;
  double phi = 0.0;
};

/// Absolute image coordinates in pixels (row may be fractional).
struct PixelCoord {
  double row = 0.0;
  double col = 0.0;
};

/// r = 2 f sin(theta / 2) for theta in [0, pi]; throws std::domain_error
/// outside that range.
double equisolid_project(double theta_rad, const CameraModel& cam);

/// theta = 2 asin(r / 2f) for r in [0, 2f]; exact inverse of
/// equisolid_project.  Throws std::domain_error outside [0, 2f].
double equisolid_unproject(double radius_px, const CameraModel& cam);

/// Fisheye radius -> perspective radius.  f tan(theta) below the
/// compensation onset, linear continuation above it.  Valid for
/// radius_px in [0, 2f]; strictly increasing.
double fisheye_to_perspective_radius(double radius_px, const CameraModel& cam);

/// Exact inverse of fisheye_to_perspective_radius (both branches).
double perspective_to_fisheye_radius(double radius_px, const CameraModel& cam);

/// Pixel -> polar fisheye.  phi is fixed to 0 at the principal point.
PolarFisheye pixel_to_polar(const PixelCoord& p, const CameraModel& cam);

/// Polar fisheye -> pixel; exact inverse of pixel_to_polar for radius > 0.
/// The result may lie outside the image bounds.
PixelCoord polar_to_pixel(const PolarFisheye& q, const CameraModel& cam);

/// Total, strictly increasing fisheye<->perspective radius map.
///
/// Matches fisheye_to_perspective_radius on [0, 2f] and continues linearly
/// past 2f so that every pixel of an image (corners included) round-trips
/// exactly; grids built from it never hit a domain error.
class RadialMap {
 public:
  explicit RadialMap(const CameraModel& cam);

  double to_perspective(double fisheye_radius) const;
  double to_fisheye(double perspective_radius) const;

 private:
  double f_;
  double theta_lim_;
  double tan_lim_;        // f tan(theta_lim)
  double inv_cos2_lim_;   // 1 / cos^2(theta_lim)
  double r_lim_;          // 2 f sin(theta_lim / 2)
  double r_full_;         // 2 f
  double t_full_;         // map value at r_full_
  double slope_full_;     // slope of the outermost linear piece
};

/// Full per-point chain: pixel -> polar -> perspective, shift the
/// perspective column by `column_offset`, then back to a fisheye pixel.
/// Pure coordinate manipulation; no luminance is touched.  A zero offset
/// returns the input coordinate unchanged (the chain is exactly the
/// identity there).
PixelCoord shift_in_perspective(const PixelCoord& p, double column_offset,
                                const CameraModel& cam, const RadialMap& map);

/// Convenience overload building the radial map on the fly.
PixelCoord shift_in_perspective(const PixelCoord& p, double column_offset,
                                const CameraModel& cam);

}  // namespace fstk
