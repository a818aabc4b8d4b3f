// SPDX-License-Identifier: Apache-2.0
#include "fstk/camera.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fstk {

namespace {
constexpr double kPi = std::numbers::pi;
}

void validate(const CameraModel& cam) {
  if (!(cam.focal_length_px > 0.0) || !std::isfinite(cam.focal_length_px))
    throw contract_error("camera: focal_length_px must be positive");
  if (!(cam.theta_lim_rad > 0.0) || !(cam.theta_lim_rad < kPi / 2.0))
    throw contract_error("camera: theta_lim_rad must lie in (0, pi/2)");
  if (!(cam.fov_deg > 0.0) || !(cam.fov_deg <= 360.0))
    throw contract_error("camera: fov_deg must lie in (0, 360]");
  if (!std::isfinite(cam.center_row) || !std::isfinite(cam.center_col))
    throw contract_error("camera: principal point must be finite");
}

double equisolid_project(double theta_rad, const CameraModel& cam) {
  if (!(theta_rad >= 0.0) || !(theta_rad <= kPi)) {
    std::ostringstream msg;
    msg << "equisolid_project: theta " << theta_rad << " outside [0, pi]";
    throw std::domain_error(msg.str());
  }
  return 2.0 * cam.focal_length_px * std::sin(theta_rad / 2.0);
}

double equisolid_unproject(double radius_px, const CameraModel& cam) {
  const double full = 2.0 * cam.focal_length_px;
  if (!(radius_px >= 0.0) || !(radius_px <= full)) {
    std::ostringstream msg;
    msg << "equisolid_unproject: radius " << radius_px << " outside [0, "
        << full << "]";
    throw std::domain_error(msg.str());
  }
  return 2.0 * std::asin(radius_px / full);
}

RadialMap::RadialMap(const CameraModel& cam) {
  f_ = cam.focal_length_px;
  theta_lim_ = cam.theta_lim_rad;
  tan_lim_ = f_ * std::tan(theta_lim_);
  const double c = std::cos(theta_lim_);
  inv_cos2_lim_ = 1.0 / (c * c);
  r_lim_ = 2.0 * f_ * std::sin(theta_lim_ / 2.0);
  r_full_ = 2.0 * f_;
  t_full_ = tan_lim_ + f_ * (kPi - theta_lim_) * inv_cos2_lim_;
  // Past r = 2f the angle parameterisation saturates; continue linearly in
  // the radius itself.  The slope is the theta-branch slope evaluated a
  // little inside the endpoint (the true slope diverges at r = 2f).
  const double theta_near = kPi - 1e-2;
  slope_full_ = inv_cos2_lim_ / std::cos(theta_near / 2.0);
}

double RadialMap::to_perspective(double fisheye_radius) const {
  if (fisheye_radius > r_full_)
    return t_full_ + slope_full_ * (fisheye_radius - r_full_);
  const double theta = 2.0 * std::asin(fisheye_radius / r_full_);
  if (theta <= theta_lim_) return f_ * std::tan(theta);
  return tan_lim_ + f_ * (theta - theta_lim_) * inv_cos2_lim_;
}

double RadialMap::to_fisheye(double perspective_radius) const {
  if (perspective_radius > t_full_)
    return r_full_ + (perspective_radius - t_full_) / slope_full_;
  double theta;
  if (perspective_radius <= tan_lim_)
    theta = std::atan(perspective_radius / f_);
  else
    theta = theta_lim_ + (perspective_radius - tan_lim_) / (f_ * inv_cos2_lim_);
  return r_full_ * std::sin(theta / 2.0);
}

double fisheye_to_perspective_radius(double radius_px, const CameraModel& cam) {
  const double full = 2.0 * cam.focal_length_px;
  if (!(radius_px >= 0.0) || !(radius_px <= full)) {
    std::ostringstream msg;
    msg << "fisheye_to_perspective_radius: radius " << radius_px
        << " outside [0, " << full << "]";
    throw std::domain_error(msg.str());
  }
  return RadialMap(cam).to_perspective(radius_px);
}

double perspective_to_fisheye_radius(double radius_px, const CameraModel& cam) {
  if (!(radius_px >= 0.0)) {
    std::ostringstream msg;
    msg << "perspective_to_fisheye_radius: negative radius " << radius_px;
    throw std::domain_error(msg.str());
  }
  return RadialMap(cam).to_fisheye(radius_px);
}

PolarFisheye pixel_to_polar(const PixelCoord& p, const CameraModel& cam) {
  const double dm = p.row - cam.center_row;
  const double dn = p.col - cam.center_col;
  PolarFisheye q;
  q.radius_px = std::hypot(dm, dn);
  q.phi = q.radius_px == 0.0 ? 0.0 : std::atan2(-dm, dn);
  return q;
}

PixelCoord polar_to_pixel(const PolarFisheye& q, const CameraModel& cam) {
  PixelCoord p;
  p.row = cam.center_row - q.radius_px * std::sin(q.phi);
  p.col = cam.center_col + q.radius_px * std::cos(q.phi);
  return p;
}

PixelCoord shift_in_perspective(const PixelCoord& p, double column_offset,
                                const CameraModel& cam, const RadialMap& map) {
  if (column_offset == 0.0) return p;  // the chain is the identity then
  const double dm = p.row - cam.center_row;
  const double dn = p.col - cam.center_col;
  const double r_f = std::hypot(dm, dn);
  const double phi = r_f == 0.0 ? 0.0 : std::atan2(-dm, dn);
  const double r_p = map.to_perspective(r_f);
  // Perspective Cartesian coordinates, centre-relative.
  const double n_p = r_p * std::cos(phi) + column_offset;
  const double m_p = -r_p * std::sin(phi);
  const double r_ps = std::hypot(m_p, n_p);
  const double phi_s = r_ps == 0.0 ? 0.0 : std::atan2(-m_p, n_p);
  const double r_fs = map.to_fisheye(r_ps);
  PixelCoord out;
  out.row = cam.center_row - r_fs * std::sin(phi_s);
  out.col = cam.center_col + r_fs * std::cos(phi_s);
  return out;
}

PixelCoord shift_in_perspective(const PixelCoord& p, double column_offset,
                                const CameraModel& cam) {
  return shift_in_perspective(p, column_offset, cam, RadialMap(cam));
}

}  // namespace fstk
